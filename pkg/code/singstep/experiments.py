"""
experiment configurations: the flat key=value file format and the named presets.

    # comment
    scheme = IE
    scheme = CN
    kappa = -1
    domain = interval
    L = pi
    T = 1
    N = 64
    N = 128

Repeated keys form lists; real values accept the token `pi`.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from .core_model import SchemeId
from .errors import ConfigError, UnknownPreset

LIST_KEYS = {"scheme": "schemes", "kappa": "kappas", "L": "lengths", "T": "final_times", "N": "steps"}
SCALAR_KEYS = {"alpha", "domain", "M", "format", "preset", "conjecture_C", "bounds", "scan"}
DESK_M = 2000


@dataclass(frozen=True)
class ExperimentConfig:
    """grid of (scheme x kappa x L x T x N) cells"""

    schemes: Tuple[SchemeId, ...] = ()
    alpha: float = 0.5
    kappas: Tuple[float, ...] = ()
    domain: str = "ode"
    lengths: Tuple[float, ...] = ()
    final_times: Tuple[float, ...] = ()
    steps: Tuple[int, ...] = ()
    M: int = DESK_M
    output_format: str = "csv"
    preset: Optional[str] = None
    conjecture_C: float = 1.0
    bounds: bool = False
    scan: bool = False
    description: str = field(default="", compare=False)

    def validate(self):
        """raise ConfigError naming the offending key"""
        for key, attr in (("scheme", "schemes"), ("kappa", "kappas"), ("T", "final_times"), ("N", "steps")):
            if not getattr(self, attr):
                raise ConfigError("missing required key", key=key)
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}", key="alpha")
        if self.domain not in ("ode", "interval"):
            raise ConfigError(f"domain must be 'ode' or 'interval', got '{self.domain}'", key="domain")
        if self.domain == "interval":
            if not self.lengths:
                raise ConfigError("an interval domain needs at least one length", key="L")
            if any(length <= 0 for length in self.lengths):
                raise ConfigError("lengths must be positive", key="L")
            if self.M < 4:
                raise ConfigError(f"M must be >= 4, got {self.M}", key="M")
        elif self.lengths:
            raise ConfigError("lengths are only meaningful on an interval domain", key="L")
        if SchemeId.L1 in self.schemes and self.domain != "interval":
            raise ConfigError("the L1 scheme needs an interval domain", key="scheme")
        if any(T <= 0 for T in self.final_times):
            raise ConfigError("final times must be positive", key="T")
        if any(N < 2 for N in self.steps):
            raise ConfigError("step counts must be >= 2", key="N")
        if not self.scan and any(N < 32 or N & (N - 1) for N in self.steps):
            raise ConfigError("step counts must be powers of two >= 32 when orders are measured", key="N")
        if self.output_format not in ("csv", "markdown"):
            raise ConfigError(f"format must be 'csv' or 'markdown', got '{self.output_format}'", key="format")
        return self


def _real(text):
    value = text.strip().lower()
    if value == "pi":
        return math.pi
    if value.endswith("*pi"):
        return float(value[:-3]) * math.pi
    return float(value)


def _bool(text):
    value = text.strip().lower()
    if value in ("true", "yes", "1", "on"):
        return True
    if value in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text}")
    return int(value)


def parse_config(text) -> ExperimentConfig:
    """parse the key=value format"""
    lists = {attr: [] for attr in LIST_KEYS.values()}
    scalars = {}

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not value:
            raise ConfigError("empty value", key=key, line=number)
        try:
            if key == "scheme":
                lists["schemes"].append(SchemeId.parse(value))
            elif key == "N":
                lists["steps"].append(_int(value))
            elif key in LIST_KEYS:
                lists[LIST_KEYS[key]].append(_real(value))
            elif key in SCALAR_KEYS:
                if key in scalars:
                    raise ConfigError("key may appear only once", key=key, line=number)
                if key == "alpha" or key == "conjecture_C":
                    scalars[key] = _real(value)
                elif key == "M":
                    scalars[key] = _int(value)
                elif key in ("bounds", "scan"):
                    scalars[key] = _bool(value)
                elif key == "format":
                    scalars["output_format"] = value
                else:
                    scalars[key] = value
            else:
                raise ConfigError("unknown key", key=key, line=number)
        except ValueError as e:
            raise ConfigError(str(e), key=key, line=number) from None

    base = ExperimentConfig()
    if "preset" in scalars:
        base = preset(scalars["preset"])
    overrides = {attr: tuple(values) for attr, values in lists.items() if values}
    overrides.update(scalars)
    return replace(base, **overrides).validate()


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def dump_config(config: ExperimentConfig) -> str:
    """serialize so that parse_config(dump_config(c)) == c"""
    lines = []
    if config.description:
        lines.append(f"# {config.description}")
    lines += [f"scheme = {scheme.value}" for scheme in config.schemes]
    lines.append(f"alpha = {config.alpha!r}")
    lines += [f"kappa = {float(kappa)!r}" for kappa in config.kappas]
    lines.append(f"domain = {config.domain}")
    lines += [f"L = {float(length)!r}" for length in config.lengths]
    lines += [f"T = {float(T)!r}" for T in config.final_times]
    lines += [f"N = {int(N)}" for N in config.steps]
    lines.append(f"M = {config.M}")
    lines.append(f"format = {config.output_format}")
    lines.append(f"conjecture_C = {float(config.conjecture_C)!r}")
    lines.append(f"bounds = {'true' if config.bounds else 'false'}")
    lines.append(f"scan = {'true' if config.scan else 'false'}")
    if config.preset:
        lines.append(f"preset = {config.preset}")
    return "\n".join(lines) + "\n"


# presets

CLASSICAL = (SchemeId.IE, SchemeId.CN, SchemeId.BDF2)
CLASSICAL_STEPS = (64, 128, 256, 512, 1024, 2048)
L1_STEPS = (32, 64, 128, 256, 512)


def dense_steps(low=64, high=2048, count=41):
    """geometric N grid for kink scans"""
    ratio = (high / low) ** (1.0 / (count - 1))
    return tuple(sorted({int(round(low * ratio ** i)) for i in range(count)}))


def _classical(name, description, kappas, final_times, lengths=(), steps=CLASSICAL_STEPS, schemes=CLASSICAL, scan=False):
    return ExperimentConfig(
        schemes=tuple(schemes),
        kappas=tuple(float(k) for k in kappas),
        domain="interval" if lengths else "ode",
        lengths=tuple(float(length) for length in lengths),
        final_times=tuple(float(T) for T in final_times),
        steps=tuple(steps),
        preset=name,
        scan=scan,
        description=description,
    )


def _l1(name, description, kappas, final_times, lengths):
    return _classical(name, description, kappas, final_times, lengths, steps=L1_STEPS, schemes=(SchemeId.L1,))


PI = math.pi

PRESETS = {
    "l1-mixed": lambda: _l1(
        "l1-mixed", "L1 scheme, kappa in {1, 0, -8}, L in {1, pi}, T in {1, 10}",
        (1, 0, -8), (1, 10), (1, PI)),
    "ie-diffusion-mixed": lambda: _classical(
        "ie-diffusion-mixed", "implicit Euler diffusion, kappa in {1, 0, -1}, L in {1, pi}, T in {1, 10}",
        (1, 0, -1), (1, 10), (1, PI), steps=(32,) + CLASSICAL_STEPS, schemes=(SchemeId.IE,)),
    "ode-kappa-sweep": lambda: _classical(
        "ode-kappa-sweep", "scalar benchmark, T = 1, decaying kappa sweep",
        (-1, -5, -10, -15, -20), (1,)),
    "ode-time-sweep": lambda: _classical(
        "ode-time-sweep", "scalar benchmark, kappa = -1, final time sweep",
        (-1,), (1, 5, 10, 15, 20)),
    "ode-growth": lambda: _classical(
        "ode-growth", "scalar benchmark, kappa >= 0",
        (0, 0.5), (1, 5)),
    "diffusion-kappa-sweep": lambda: _classical(
        "diffusion-kappa-sweep", "diffusion on (0, pi), T = 1, kappa sweep",
        (0, -5, -10, -15, -20), (1,), (PI,)),
    "diffusion-length-sweep": lambda: _classical(
        "diffusion-length-sweep", "diffusion, kappa = 0, T = 10, length sweep",
        (0,), (10,), (1, 2, 3, 4, 5)),
    "diffusion-time-sweep": lambda: _classical(
        "diffusion-time-sweep", "diffusion on (0, pi), kappa = 0, final time sweep",
        (0,), (1, 5, 10, 15, 20), (PI,)),
    "diffusion-growth": lambda: _classical(
        "diffusion-growth", "diffusion, T = 5, kappa >= lambda1",
        (1, 1.5), (5,), (PI, 4)),
    "l1-kappa-sweep": lambda: _l1(
        "l1-kappa-sweep", "L1 scheme on (0, pi), T = 1, kappa sweep",
        (0, -5, -10, -20, -50), (1,), (PI,)),
    "l1-length-sweep": lambda: _l1(
        "l1-length-sweep", "L1 scheme, kappa = 0, T = 10, length sweep",
        (0,), (10,), (1, 2, 3, 4, 5)),
    "l1-time-sweep": lambda: _l1(
        "l1-time-sweep", "L1 scheme on (0, pi), kappa = 0, final time sweep",
        (0,), (1, 10, 20, 50, 100), (PI,)),
    "l1-growth": lambda: _l1(
        "l1-growth", "L1 scheme, T = 5, kappa >= lambda1",
        (1, 1.5), (5,), (PI, 4)),
    "kink-ode": lambda: _classical(
        "kink-ode", "scalar benchmark error-vs-N scan, kappa = -10, T = 1",
        (-10,), (1,), steps=dense_steps(), schemes=(SchemeId.CN, SchemeId.BDF2), scan=True),
    "kink-pde": lambda: _classical(
        "kink-pde", "diffusion error-vs-N scan on (0, pi), kappa = 0, T = 12",
        (0,), (12,), (PI,), steps=dense_steps(), schemes=(SchemeId.CN, SchemeId.BDF2), scan=True),
}

# numbered names of the published rate tables
PRESET_ALIASES = {
    "table1": "l1-mixed",
    "table2": "ie-diffusion-mixed",
    "table3": "ode-kappa-sweep",
    "table4": "ode-time-sweep",
    "table5": "ode-growth",
    "table6": "diffusion-kappa-sweep",
    "table7": "diffusion-length-sweep",
    "table8": "diffusion-time-sweep",
    "table9": "diffusion-growth",
    "table10": "l1-kappa-sweep",
    "table11": "l1-length-sweep",
    "table12": "l1-time-sweep",
    "table13": "l1-growth",
}


def preset(name) -> ExperimentConfig:
    try:
        factory = PRESETS[PRESET_ALIASES.get(name, name)]
    except KeyError:
        raise UnknownPreset(name, set(PRESETS) | set(PRESET_ALIASES)) from None
    return factory().validate()
