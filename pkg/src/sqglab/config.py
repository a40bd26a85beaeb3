"""Parsing and validation of experiment description files.

The file format is deliberately small: INI-style ``[section]`` headers,
``key = value`` assignments, ``#``/``;`` full-line comments, and bracketed
arrays like ``alphas = [0.75, 0.6, 0.51]``.  Scalars are parsed as ints,
floats, booleans (``true``/``false``), or bare strings.  Every parse or
validation failure raises :class:`~sqglab.errors.ConfigError` pointing at
the offending line; problems only visible at end of file (missing sections
or keys) cite the last line.

Sections and keys by experiment kind::

    [experiment]  kind = simulate | sweep-alpha | operator-tests |
                         estimates-report | dirichlet-sweep
    [domain]      n (power of two >= 16), box (default 2*pi),
                  basis = torus | dirichlet
    [params]      kappa, alpha (fixed-alpha kinds only), lambda (default 0)
    [forcing]     type = none | cosine | sine, mode = [k1, k2], amplitude
    [stepper]     dt (default: CFL-derived), t_end, scheme = etd2rk | etd1,
                  sample_every (default 1)
    [init]        type = random | shear | bump, seed, decay, amplitude,
                  mode, width
    [monitors]    lq = [2, 4], sobolev = [1.5], damped_energy = true,
                  tail_cutoff = 4.0          (estimates-report, simulate)
    [sweep]       alphas = [...], epsilon, c3 (sweep kinds)
    [operator]    size, seed, trials, laplacian_n (operator-tests)
    [output]      dir
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

from .critical import DEFAULT_SWEEP_ALPHAS, AlphaSweepConfig
from .dynamics import Scheme, SqgParams, StepperConfig, default_dt
from .errors import ConfigError
from .fields import gaussian_bump_field, random_smooth_field, shear_field
from .spectral import (
    Basis,
    DomainSpec,
    SpectralField,
    cosine_field,
    sine_mode_field,
)

__all__ = [
    "EXPERIMENT_KINDS",
    "Entry",
    "ParsedConfig",
    "Experiment",
    "parse_config_text",
    "parse_config_file",
    "load_experiment",
    "load_config_file",
]

EXPERIMENT_KINDS: tuple[str, ...] = (
    "simulate",
    "sweep-alpha",
    "operator-tests",
    "estimates-report",
    "dirichlet-sweep",
)

_KNOWN_KEYS: dict[str, frozenset] = {
    "experiment": frozenset({"kind"}),
    "domain": frozenset({"n", "box", "basis"}),
    "params": frozenset({"kappa", "alpha", "lambda"}),
    "forcing": frozenset({"type", "mode", "amplitude"}),
    "stepper": frozenset({"dt", "t_end", "scheme", "sample_every"}),
    "init": frozenset({"type", "seed", "decay", "amplitude", "mode", "width"}),
    "monitors": frozenset({"lq", "sobolev", "damped_energy", "tail_cutoff"}),
    "sweep": frozenset({"alphas", "epsilon", "c3"}),
    "operator": frozenset({"size", "seed", "trials", "laplacian_n"}),
    "output": frozenset({"dir"}),
}

_SECTIONS_BY_KIND: dict[str, frozenset] = {
    "simulate": frozenset(
        {"experiment", "domain", "params", "forcing", "stepper", "init", "monitors", "output"}
    ),
    "estimates-report": frozenset(
        {"experiment", "domain", "params", "forcing", "stepper", "init", "monitors", "output"}
    ),
    "sweep-alpha": frozenset(
        {"experiment", "domain", "params", "forcing", "stepper", "init", "sweep", "output"}
    ),
    "dirichlet-sweep": frozenset(
        {"experiment", "domain", "params", "forcing", "stepper", "init", "sweep", "output"}
    ),
    "operator-tests": frozenset({"experiment", "operator", "output"}),
}

_SECTION_RE = re.compile(r"^\[([A-Za-z0-9_-]+)\]$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

_MISSING = object()


@dataclass(frozen=True)
class Entry:
    """A parsed value together with the line it came from."""

    value: object
    line: int


@dataclass(frozen=True)
class ParsedConfig:
    """Raw section/key table with per-entry line provenance."""

    source: str
    n_lines: int
    sections: Mapping[str, Mapping[str, Entry]]
    section_lines: Mapping[str, int]

    def _fail(self, message: str, line: int | None = None) -> ConfigError:
        return ConfigError(
            message, source=self.source, line=self.n_lines if line is None else line
        )

    def section_line(self, section: str) -> int:
        return self.section_lines.get(section, self.n_lines)

    def has(self, section: str, key: str | None = None) -> bool:
        if section not in self.sections:
            return False
        return key is None or key in self.sections[section]

    def entry(self, section: str, key: str) -> Entry | None:
        return self.sections.get(section, {}).get(key)

    def line_of(self, section: str, key: str) -> int:
        found = self.entry(section, key)
        return found.line if found is not None else self.section_line(section)

    # -- typed getters ----------------------------------------------------

    def get_str(self, section: str, key: str, default=_MISSING, choices=None) -> str:
        value = self._raw(section, key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (str, int, float)):
            raise self._fail(
                f"{key} must be a string, got {value!r}", self.line_of(section, key)
            )
        text = str(value)
        if choices is not None and text not in choices:
            raise self._fail(
                f"{key} must be one of {sorted(choices)}, got {text!r}",
                self.line_of(section, key),
            )
        return text

    def get_float(
        self, section: str, key: str, default=_MISSING, allow_inf: bool = False
    ) -> float:
        value = self._raw(section, key, default)
        if value is None:
            return None
        out = self._coerce_float(value, section, key, allow_inf)
        return out

    def get_int(self, section: str, key: str, default=_MISSING) -> int:
        value = self._raw(section, key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise self._fail(
                f"{key} must be an integer, got {value!r}", self.line_of(section, key)
            )
        return int(value)

    def get_bool(self, section: str, key: str, default=_MISSING) -> bool:
        value = self._raw(section, key, default)
        if value is None:
            return None
        if not isinstance(value, bool):
            raise self._fail(
                f"{key} must be true or false, got {value!r}",
                self.line_of(section, key),
            )
        return value

    def get_floats(
        self, section: str, key: str, default=_MISSING, allow_inf: bool = False
    ) -> tuple:
        value = self._raw(section, key, default)
        if value is None:
            return None
        if not isinstance(value, tuple):
            raise self._fail(
                f"{key} must be an array like [1, 2, 3], got {value!r}",
                self.line_of(section, key),
            )
        return tuple(
            self._coerce_float(item, section, key, allow_inf) for item in value
        )

    def get_ints(self, section: str, key: str, default=_MISSING) -> tuple:
        value = self._raw(section, key, default)
        if value is None:
            return None
        if not isinstance(value, tuple) or any(
            isinstance(item, bool) or not isinstance(item, int) for item in value
        ):
            raise self._fail(
                f"{key} must be an array of integers, got {value!r}",
                self.line_of(section, key),
            )
        return tuple(int(item) for item in value)

    # -- internals ---------------------------------------------------------

    def _raw(self, section: str, key: str, default):
        found = self.entry(section, key)
        if found is not None:
            return found.value
        if default is _MISSING:
            raise self._fail(
                f"missing required key '{key}' in section [{section}]",
                self.section_line(section),
            )
        return default

    def _coerce_float(self, value, section: str, key: str, allow_inf: bool) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self._fail(
                f"{key} must be a number, got {value!r}", self.line_of(section, key)
            )
        out = float(value)
        if math.isnan(out) or (not allow_inf and math.isinf(out)):
            raise self._fail(
                f"{key} must be finite, got {out!r}", self.line_of(section, key)
            )
        return out


def _parse_scalar(token: str, source: str, line: int):
    lowered = token.lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    if len(token) >= 2 and token[0] == token[-1] and token[0] in {"'", '"'}:
        return token[1:-1]
    if any(ch in token for ch in "[]=,"):
        raise ConfigError(
            f"cannot parse value {token!r}", source=source, line=line
        )
    return token


def _parse_value(raw: str, source: str, line: int):
    raw = raw.strip()
    if not raw:
        raise ConfigError("empty value", source=source, line=line)
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ConfigError(
                f"unterminated array {raw!r}", source=source, line=line
            )
        inner = raw[1:-1].strip()
        if not inner:
            return ()
        items = [item.strip() for item in inner.split(",")]
        if any(not item for item in items):
            raise ConfigError(
                f"empty element in array {raw!r}", source=source, line=line
            )
        return tuple(_parse_scalar(item, source, line) for item in items)
    return _parse_scalar(raw, source, line)


def parse_config_text(text: str, source: str = "<config>") -> ParsedConfig:
    """Parse the INI-like grammar into a raw section/key table."""
    sections: dict[str, dict[str, Entry]] = {}
    section_lines: dict[str, int] = {}
    current: str | None = None
    lines = text.splitlines()
    for lineno, raw_line in enumerate(lines, start=1):
        line = raw_line.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        header = _SECTION_RE.match(line)
        if header:
            name = header.group(1)
            if name not in _KNOWN_KEYS:
                raise ConfigError(
                    f"unknown section [{name}]", source=source, line=lineno
                )
            if name in sections:
                raise ConfigError(
                    f"duplicate section [{name}] (first at line {section_lines[name]})",
                    source=source,
                    line=lineno,
                )
            sections[name] = {}
            section_lines[name] = lineno
            current = name
            continue
        if "=" not in line:
            raise ConfigError(
                f"expected 'key = value' or '[section]', got {line!r}",
                source=source,
                line=lineno,
            )
        key, _, value = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"invalid key {key!r}", source=source, line=lineno)
        if current is None:
            raise ConfigError(
                f"key {key!r} appears before any [section] header",
                source=source,
                line=lineno,
            )
        if key not in _KNOWN_KEYS[current]:
            raise ConfigError(
                f"unknown key {key!r} in section [{current}] "
                f"(known: {sorted(_KNOWN_KEYS[current])})",
                source=source,
                line=lineno,
            )
        if key in sections[current]:
            raise ConfigError(
                f"duplicate key {key!r} in section [{current}] "
                f"(first at line {sections[current][key].line})",
                source=source,
                line=lineno,
            )
        sections[current][key] = Entry(_parse_value(value, source, lineno), lineno)
    return ParsedConfig(
        source=source,
        n_lines=max(1, len(lines)),
        sections=sections,
        section_lines=section_lines,
    )


def parse_config_file(path) -> ParsedConfig:
    """Read and parse a configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


@dataclass(frozen=True)
class Experiment:
    """Validated, ready-to-run experiment description.

    Everything that can be checked without running has been checked; the
    helper methods construct the runtime objects (initial field, stepper,
    sweep configuration) deterministically from the stored parameters.
    """

    kind: str
    out_dir: str | None
    domain: DomainSpec | None
    params: SqgParams | None
    kappa: float | None
    lam: float
    forcing: SpectralField | None
    dt: float | None
    t_end: float | None
    scheme: Scheme
    sample_every: int
    init_kind: str | None
    init_seed: int
    init_decay: float
    init_amplitude: float
    init_mode: int
    init_width: float | None
    monitor_lq: tuple[float, ...]
    monitor_sobolev: tuple[float, ...]
    monitor_damped_energy: bool
    monitor_tail_cutoff: float | None
    sweep_alphas: tuple[float, ...]
    sweep_epsilon: float
    sweep_c3: float | None
    operator_size: int
    operator_seed: int
    operator_trials: int
    operator_laplacian_n: int

    def initial_field(self, seed_override: int | None = None) -> SpectralField:
        """Build the initial condition (CLI --seed overrides the file seed)."""
        if self.domain is None or self.init_kind is None:
            raise ValueError(f"experiment kind {self.kind!r} has no initial field")
        if self.init_kind == "random":
            seed = self.init_seed if seed_override is None else int(seed_override)
            return random_smooth_field(
                self.domain, seed, decay=self.init_decay, amplitude=self.init_amplitude
            )
        if self.init_kind == "shear":
            return shear_field(
                self.domain, amplitude=self.init_amplitude, mode=self.init_mode
            )
        return gaussian_bump_field(
            self.domain, width=self.init_width, amplitude=self.init_amplitude
        )

    def stepper_for(self, theta0: SpectralField) -> StepperConfig:
        """Stepper for the fixed-alpha kinds, with CFL-derived default dt."""
        if self.t_end is None:
            raise ValueError(f"experiment kind {self.kind!r} does not time-step")
        dt = self.dt if self.dt is not None else default_dt(theta0)
        return StepperConfig(
            dt=min(dt, self.t_end),
            t_end=self.t_end,
            scheme=self.scheme,
            sample_every=self.sample_every,
        )

    def sweep_config(self, theta0: SpectralField) -> AlphaSweepConfig:
        """Sweep configuration for the alpha-marching kinds."""
        if self.kind not in ("sweep-alpha", "dirichlet-sweep"):
            raise ValueError(f"experiment kind {self.kind!r} is not a sweep")
        return AlphaSweepConfig(
            theta0=theta0,
            kappa=self.kappa,
            alphas=self.sweep_alphas,
            lam=self.lam,
            forcing=self.forcing,
            t_end=self.t_end,
            dt=self.dt,
            sample_every=self.sample_every,
            scheme=self.scheme,
        )


def load_experiment(parsed: ParsedConfig) -> Experiment:
    """Validate a raw table into an :class:`Experiment`."""
    kind = parsed.get_str("experiment", "kind", choices=set(EXPERIMENT_KINDS))
    allowed = _SECTIONS_BY_KIND[kind]
    for section in parsed.sections:
        if section not in allowed:
            raise ConfigError(
                f"section [{section}] is not used by experiment kind {kind!r}",
                source=parsed.source,
                line=parsed.section_line(section),
            )

    out_dir = parsed.get_str("output", "dir", default=None)

    if kind == "operator-tests":
        size = parsed.get_int("operator", "size", default=16)
        op_seed = parsed.get_int("operator", "seed", default=0)
        trials = parsed.get_int("operator", "trials", default=200)
        lap_n = parsed.get_int("operator", "laplacian_n", default=32)
        for name, value, minimum in (
            ("size", size, 2),
            ("trials", trials, 1),
            ("laplacian_n", lap_n, 2),
        ):
            if value < minimum:
                raise ConfigError(
                    f"{name} must be at least {minimum}, got {value}",
                    source=parsed.source,
                    line=parsed.line_of("operator", name),
                )
        return Experiment(
            kind=kind,
            out_dir=out_dir,
            domain=None,
            params=None,
            kappa=None,
            lam=0.0,
            forcing=None,
            dt=None,
            t_end=None,
            scheme=Scheme.ETD2RK,
            sample_every=1,
            init_kind=None,
            init_seed=0,
            init_decay=4.0,
            init_amplitude=1.0,
            init_mode=1,
            init_width=None,
            monitor_lq=(),
            monitor_sobolev=(),
            monitor_damped_energy=False,
            monitor_tail_cutoff=None,
            sweep_alphas=DEFAULT_SWEEP_ALPHAS,
            sweep_epsilon=0.25,
            sweep_c3=None,
            operator_size=size,
            operator_seed=op_seed,
            operator_trials=trials,
            operator_laplacian_n=lap_n,
        )

    # -- every remaining kind runs the PDE and needs a domain --------------
    is_sweep = kind in ("sweep-alpha", "dirichlet-sweep")

    n = parsed.get_int("domain", "n")
    box = parsed.get_float("domain", "box", default=2.0 * math.pi)
    default_basis = "dirichlet" if kind == "dirichlet-sweep" else "torus"
    basis_name = parsed.get_str(
        "domain", "basis", default=default_basis, choices={"torus", "dirichlet"}
    )
    if kind == "dirichlet-sweep" and basis_name != "dirichlet":
        raise ConfigError(
            "dirichlet-sweep requires basis = dirichlet",
            source=parsed.source,
            line=parsed.line_of("domain", "basis"),
        )
    try:
        domain = DomainSpec(
            n=n,
            box=box,
            basis=Basis.TORUS if basis_name == "torus" else Basis.DIRICHLET,
        )
    except ValueError as err:
        key = "n" if "n must" in str(err) else "box"
        raise ConfigError(
            str(err), source=parsed.source, line=parsed.line_of("domain", key)
        ) from err

    kappa = parsed.get_float("params", "kappa")
    lam = parsed.get_float("params", "lambda", default=0.0)
    alpha = parsed.get_float("params", "alpha", default=None)
    if is_sweep and alpha is not None:
        raise ConfigError(
            "alpha is fixed per sweep member; set [sweep] alphas instead",
            source=parsed.source,
            line=parsed.line_of("params", "alpha"),
        )
    if not is_sweep and alpha is None:
        raise ConfigError(
            f"missing required key 'alpha' in section [params] for kind {kind!r}",
            source=parsed.source,
            line=parsed.section_line("params"),
        )

    forcing = _build_forcing(parsed, domain)

    params = None
    if not is_sweep:
        try:
            params = SqgParams(kappa=kappa, alpha=alpha, lam=lam, forcing=forcing)
        except ValueError as err:
            message = str(err)
            if "alpha" in message:
                key = "alpha"
            elif "lam" in message:
                key = "lambda"
            else:
                key = "kappa"
            raise ConfigError(
                message, source=parsed.source, line=parsed.line_of("params", key)
            ) from err
    else:
        if kappa <= 0:
            raise ConfigError(
                f"kappa must be positive, got {kappa!r}",
                source=parsed.source,
                line=parsed.line_of("params", "kappa"),
            )
        if lam < 0:
            raise ConfigError(
                f"lambda must be nonnegative, got {lam!r}",
                source=parsed.source,
                line=parsed.line_of("params", "lambda"),
            )

    t_end = parsed.get_float("stepper", "t_end")
    if t_end <= 0:
        raise ConfigError(
            f"t_end must be positive, got {t_end!r}",
            source=parsed.source,
            line=parsed.line_of("stepper", "t_end"),
        )
    dt = parsed.get_float("stepper", "dt", default=None)
    if dt is not None and not 0 < dt <= t_end:
        raise ConfigError(
            f"dt must lie in (0, t_end], got {dt!r}",
            source=parsed.source,
            line=parsed.line_of("stepper", "dt"),
        )
    scheme_name = parsed.get_str(
        "stepper", "scheme", default="etd2rk", choices={"etd2rk", "etd1"}
    )
    scheme = Scheme.ETD2RK if scheme_name == "etd2rk" else Scheme.ETD1
    sample_every = parsed.get_int("stepper", "sample_every", default=1)
    if sample_every < 1:
        raise ConfigError(
            f"sample_every must be a positive integer, got {sample_every!r}",
            source=parsed.source,
            line=parsed.line_of("stepper", "sample_every"),
        )

    init = _build_init(parsed, domain, kind)
    monitors = _build_monitors(parsed, domain, lam)
    sweep = _build_sweep(parsed) if is_sweep else ((), 0.25, None)

    return Experiment(
        kind=kind,
        out_dir=out_dir,
        domain=domain,
        params=params,
        kappa=kappa,
        lam=lam,
        forcing=forcing,
        dt=dt,
        t_end=t_end,
        scheme=scheme,
        sample_every=sample_every,
        init_kind=init[0],
        init_seed=init[1],
        init_decay=init[2],
        init_amplitude=init[3],
        init_mode=init[4],
        init_width=init[5],
        monitor_lq=monitors[0],
        monitor_sobolev=monitors[1],
        monitor_damped_energy=monitors[2],
        monitor_tail_cutoff=monitors[3],
        sweep_alphas=sweep[0] if sweep[0] else DEFAULT_SWEEP_ALPHAS,
        sweep_epsilon=sweep[1],
        sweep_c3=sweep[2],
        operator_size=16,
        operator_seed=0,
        operator_trials=200,
        operator_laplacian_n=32,
    )


def _build_forcing(parsed: ParsedConfig, domain: DomainSpec) -> SpectralField | None:
    if not parsed.has("forcing"):
        return None
    ftype = parsed.get_str(
        "forcing", "type", default="none", choices={"none", "cosine", "sine"}
    )
    if ftype == "none":
        return None
    mode = parsed.get_ints("forcing", "mode", default=(1, 0) if ftype == "cosine" else (1, 1))
    if len(mode) != 2:
        raise ConfigError(
            f"forcing mode must have two components, got {mode!r}",
            source=parsed.source,
            line=parsed.line_of("forcing", "mode"),
        )
    amplitude = parsed.get_float("forcing", "amplitude", default=1.0)
    line = parsed.line_of("forcing", "type")
    if ftype == "cosine" and domain.basis is not Basis.TORUS:
        raise ConfigError(
            "cosine forcing requires the torus basis",
            source=parsed.source,
            line=line,
        )
    if ftype == "sine" and domain.basis is Basis.TORUS:
        raise ConfigError(
            "sine forcing requires the dirichlet basis",
            source=parsed.source,
            line=line,
        )
    try:
        if ftype == "cosine":
            return cosine_field(domain, (mode[0], mode[1]), amplitude)
        return sine_mode_field(domain, (mode[0], mode[1]), amplitude)
    except ValueError as err:
        raise ConfigError(
            str(err), source=parsed.source, line=parsed.line_of("forcing", "mode")
        ) from err


def _build_init(parsed: ParsedConfig, domain: DomainSpec, kind: str):
    itype = parsed.get_str("init", "type", choices={"random", "shear", "bump"})
    seed = parsed.get_int("init", "seed", default=0)
    decay = parsed.get_float("init", "decay", default=4.0)
    amplitude = parsed.get_float("init", "amplitude", default=1.0)
    mode = parsed.get_int("init", "mode", default=1)
    width = parsed.get_float("init", "width", default=None)

    if amplitude <= 0:
        raise ConfigError(
            f"amplitude must be positive, got {amplitude!r}",
            source=parsed.source,
            line=parsed.line_of("init", "amplitude"),
        )
    if itype == "random" and decay <= 1.0:
        raise ConfigError(
            f"decay must exceed 1 for a smooth field, got {decay!r}",
            source=parsed.source,
            line=parsed.line_of("init", "decay"),
        )
    if itype == "shear":
        if domain.basis is not Basis.TORUS:
            raise ConfigError(
                "shear initial data requires the torus basis",
                source=parsed.source,
                line=parsed.line_of("init", "type"),
            )
        if not 1 <= mode < domain.n // 2:
            raise ConfigError(
                f"mode must lie in [1, n/2), got {mode!r}",
                source=parsed.source,
                line=parsed.line_of("init", "mode"),
            )
    if itype == "bump":
        if width is None:
            raise ConfigError(
                "bump initial data requires a width",
                source=parsed.source,
                line=parsed.section_line("init"),
            )
        if not 0 < width <= domain.box / 4:
            raise ConfigError(
                f"width must lie in (0, box/4], got {width!r}",
                source=parsed.source,
                line=parsed.line_of("init", "width"),
            )
    return (itype, seed, decay, amplitude, mode, width)


def _build_monitors(parsed: ParsedConfig, domain: DomainSpec, lam: float):
    lq = parsed.get_floats("monitors", "lq", default=(), allow_inf=True)
    for q in lq:
        if q < 2:
            raise ConfigError(
                f"lq orders must be >= 2, got {q!r}",
                source=parsed.source,
                line=parsed.line_of("monitors", "lq"),
            )
    sobolev = parsed.get_floats("monitors", "sobolev", default=())
    for s in sobolev:
        if s <= 0:
            raise ConfigError(
                f"sobolev orders must be positive, got {s!r}",
                source=parsed.source,
                line=parsed.line_of("monitors", "sobolev"),
            )
    damped = parsed.get_bool("monitors", "damped_energy", default=False)
    if damped and lam <= 0:
        raise ConfigError(
            "damped_energy monitoring requires lambda > 0",
            source=parsed.source,
            line=parsed.line_of("monitors", "damped_energy"),
        )
    tail = parsed.get_float("monitors", "tail_cutoff", default=None)
    if tail is not None and not (tail > 0 and 4 * tail <= domain.box):
        raise ConfigError(
            f"tail_cutoff must satisfy 0 < 4*cutoff <= box, got {tail!r}",
            source=parsed.source,
            line=parsed.line_of("monitors", "tail_cutoff"),
        )
    return (lq, sobolev, damped, tail)


def _build_sweep(parsed: ParsedConfig):
    alphas = parsed.get_floats("sweep", "alphas", default=DEFAULT_SWEEP_ALPHAS)
    line = parsed.line_of("sweep", "alphas")
    if not alphas:
        raise ConfigError(
            "alphas must contain at least one dissipation order",
            source=parsed.source,
            line=line,
        )
    for a in alphas:
        if not 0.5 < a <= 1.0:
            raise ConfigError(
                f"sweep alphas must lie in (1/2, 1], got {a!r}",
                source=parsed.source,
                line=line,
            )
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ConfigError(
            "alphas must be strictly decreasing", source=parsed.source, line=line
        )
    if alphas[-1] < 0.505:
        raise ConfigError(
            "the final alpha must stay at or above 0.505",
            source=parsed.source,
            line=line,
        )
    epsilon = parsed.get_float("sweep", "epsilon", default=0.25)
    if not 0 < epsilon < 0.5:
        raise ConfigError(
            f"epsilon must lie in (0, 1/2), got {epsilon!r}",
            source=parsed.source,
            line=parsed.line_of("sweep", "epsilon"),
        )
    c3 = parsed.get_float("sweep", "c3", default=None)
    if c3 is not None and c3 <= 0:
        raise ConfigError(
            f"c3 must be positive, got {c3!r}",
            source=parsed.source,
            line=parsed.line_of("sweep", "c3"),
        )
    return (alphas, epsilon, c3)


def load_config_file(path) -> Experiment:
    """Parse and validate an experiment file in one step."""
    return load_experiment(parse_config_file(path))
