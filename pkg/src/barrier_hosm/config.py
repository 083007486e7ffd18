"""Scenario files: TOML with sections [hong], [mode], [schedule], [uncertainty], [sim].

Example::

    [hong]
    r = 3
    kappa = "-1/3"          # float or fraction string
    gains = [1, 2, 5]

    [mode]
    variant = "BarrierTimeVarying"
    k = 1.0
    g = { kind = "Constant", c0 = 1.0 }

    [schedule]
    epsilon = 1.0
    M = 0.2

    [uncertainty]
    phi = [["sgn_cos", 5, 1], ["sin", -20, 2]]
    gamma = [["const", 3, 0], ["sgn_sin", -2, 3]]
    bounds = { phi_bar = 25, gamma_m = 1, gamma_M = 5 }

    [sim]
    z0 = [4, 4, -4]
    tau = 1e-4
    horizon = 15
"""
from __future__ import annotations

import re
from fractions import Fraction

try:
    import tomllib as tomli
except ModuleNotFoundError:  # Python < 3.11
    import tomli

from .controllers import ControllerMode, GainFunctionSpec, HongParams, Variant
from .errors import ConfigurationError, HosmError
from .homogeneity import make_profile
from .lyapunov import GainSchedule
from .simulation import Bounds, Scenario, UncertaintySpec

_KEYS = {
    "hong": {"r", "kappa", "p_base", "gains"},
    "mode": {"variant", "k", "g", "phi_bar", "gamma_m"},
    "schedule": {"epsilon", "M", "ramp_kind", "ramp_exponent", "clamp_delta"},
    "uncertainty": {"phi", "gamma", "bounds"},
    "sim": {"z0", "tau", "horizon", "record_stride"},
}
_SUBKEYS = {"g": {"kind", "c0", "c1"}, "bounds": {"phi_bar", "gamma_m", "gamma_M"}}


class ConfigError(ConfigurationError):
    """Malformed scenario file; ``line`` is 1-based when known."""

    def __init__(self, path, message, line=None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: {message}")


def _find_line(text, section, key):
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        m = re.match(r"\[\s*([A-Za-z_]+)\s*\]", s)
        if m:
            current = m.group(1)
            if key is None and current == section:
                return n
        elif current == section and key is not None and re.match(rf"{re.escape(key)}\s*=", s):
            return n
    return None


def _number(val):
    if isinstance(val, str):
        return float(Fraction(val.strip()))
    if isinstance(val, bool):
        raise TypeError("boolean is not a number")
    return float(val)


def _parse(path, required):
    text = open(path, encoding="utf-8").read()
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(path, f"TOML syntax: {exc}", int(m.group(1)) if m else None) from None

    def fail(section, key, msg):
        raise ConfigError(path, msg, _find_line(text, section, key))

    for section, body in doc.items():
        if section not in _KEYS:
            fail(section, None, f"unknown section [{section}]")
        if not isinstance(body, dict):
            fail(section, None, f"[{section}] must be a table")
        for key, val in body.items():
            if key not in _KEYS[section]:
                fail(section, key, f"unknown key {key!r} in [{section}]")
            if key in _SUBKEYS:
                if not isinstance(val, dict):
                    fail(section, key, f"{key} must be an inline table")
                extra = set(val) - _SUBKEYS[key]
                if extra:
                    fail(section, key, f"unknown field(s) {sorted(extra)} in {key}")
    for section in required:
        if section not in doc:
            raise ConfigError(path, f"missing section [{section}]")
    return text, doc, fail


def _hong(doc, fail):
    h = doc["hong"]
    for key in ("r", "kappa", "gains"):
        if key not in h:
            fail("hong", None, f"missing key {key!r} in [hong]")
    try:
        profile = make_profile(int(h["r"]), _number(h["kappa"]), _number(h.get("p_base", 1.0)))
        return HongParams(profile, tuple(_number(g) for g in h["gains"]))
    except (HosmError, TypeError, ValueError, ZeroDivisionError) as exc:
        fail("hong", "kappa" if "kappa" in str(exc) else None, str(exc))


def load_hong_params(path) -> HongParams:
    """Read only the [hong] section of a file."""
    _, doc, fail = _parse(path, ["hong"])
    return _hong(doc, fail)


def load_scenario(path) -> Scenario:
    """Parse a scenario file; raises :class:`ConfigError` with a line anchor."""
    _, doc, fail = _parse(path, ["hong", "mode", "sim"])
    hong = _hong(doc, fail)

    m = doc["mode"]
    try:
        variant = Variant(m.get("variant"))
    except ValueError:
        fail("mode", "variant", f"unknown variant {m.get('variant')!r}")
    try:
        g = GainFunctionSpec(**{k: (v if k == "kind" else _number(v)) for k, v in m["g"].items()}) if "g" in m else None
        mode = ControllerMode(
            variant,
            k=_number(m["k"]) if "k" in m else None,
            g=g,
            phi_bar=_number(m["phi_bar"]) if "phi_bar" in m else None,
            gamma_m=_number(m["gamma_m"]) if "gamma_m" in m else None,
        )
    except (HosmError, TypeError, ValueError, ZeroDivisionError) as exc:
        fail("mode", None, str(exc))

    schedule = None
    if "schedule" in doc:
        s = doc["schedule"]
        try:
            kwargs = {k: (v if k == "ramp_kind" else _number(v)) for k, v in s.items()}
            schedule = GainSchedule(k=mode.k if mode.k is not None else 1.0,
                                    g=mode.g or GainFunctionSpec(), **kwargs)
        except (HosmError, TypeError, ValueError, ZeroDivisionError) as exc:
            fail("schedule", None, str(exc))

    u = doc.get("uncertainty", {})
    try:
        bounds = Bounds(**{k: _number(v) for k, v in u["bounds"].items()}) if "bounds" in u else None
        unc = UncertaintySpec(
            phi_terms=tuple(tuple(a) for a in u.get("phi", [])),
            gamma_terms=tuple(tuple(a) for a in u.get("gamma", [])),
            bounds=bounds,
        )
    except (HosmError, TypeError, ValueError, ZeroDivisionError) as exc:
        fail("uncertainty", None, str(exc))

    sim = doc["sim"]
    for key in ("z0", "tau", "horizon"):
        if key not in sim:
            fail("sim", None, f"missing key {key!r} in [sim]")
    try:
        return Scenario(
            hong=hong,
            mode=mode,
            uncertainty=unc,
            z0=tuple(_number(x) for x in sim["z0"]),
            tau=_number(sim["tau"]),
            horizon=_number(sim["horizon"]),
            record_stride=int(sim.get("record_stride", 1)),
            schedule=schedule,
        )
    except (HosmError, TypeError, ValueError, ZeroDivisionError) as exc:
        fail("sim", None, str(exc))
