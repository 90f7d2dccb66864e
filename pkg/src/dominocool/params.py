"""Parameter ingestion and normalization.

Two parameter sets exist side by side:

* :class:`PhysicalParams` holds the lab-frame inputs (masses, spring
  constants, laser power, cavity geometry) in SI units with angular
  frequencies.
* :class:`ChainParams` holds the dimensionless working set every solver
  consumes.  All rates are expressed in units of a reference frequency,
  chosen as the normalized frequency of the first resonator, so
  ``omega_j[0] == 1`` after conversion.

The cold-damping operating point fixes the effective cavity detuning to
zero; configs requesting anything else are rejected at load time.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

log = logging.getLogger(__name__)

HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23  # J / K

THERMAL_MODES = ("markovian", "full-coth")

DEFAULT_ZETA = 0.8


@dataclass(frozen=True)
class PhysicalParams:
    """Lab-frame description of the driven cavity and mechanical chain.

    Frequencies and decay rates are angular (rad/s); masses in kg, power
    in W, cavity length in m.  ``eta_j`` holds the N-1 position-position
    spring constants (N/m) between neighbouring resonators.
    """

    m_j: tuple[float, ...]
    omega_tilde_j: tuple[float, ...]
    eta_j: tuple[float, ...]
    kappa: float
    P_L: float
    omega_L: float
    omega_c: float
    L: float
    gamma_j: tuple[float, ...]
    nbar_j: tuple[float, ...]
    g_cd: float
    omega_fb: float
    zeta: float = DEFAULT_ZETA

    @property
    def N(self) -> int:
        return len(self.m_j)


@dataclass(frozen=True)
class ChainParams:
    """Dimensionless working parameters, in units of the reference frequency.

    ``thermal_mode`` selects the bath convention: ``markovian`` uses a
    flat thermal force spectrum ``(2 nbar + 1) gamma`` while
    ``full-coth`` keeps the frequency-dependent coth factor.
    """

    omega_j: tuple[float, ...]
    gamma_j: tuple[float, ...]
    eta_tilde_j: tuple[float, ...]
    kappa: float
    G: float
    g_cd: float
    omega_fb: float
    zeta: float
    nbar_j: tuple[float, ...]
    thermal_mode: str = "markovian"

    @property
    def N(self) -> int:
        return len(self.omega_j)


def _as_tuple(x) -> tuple[float, ...]:
    if np.isscalar(x):
        return (float(x),)
    return tuple(float(v) for v in x)


def validate_physical(p: PhysicalParams) -> None:
    """Raise :class:`ConfigError` on any invalid lab-frame input."""
    N = p.N
    if N < 1:
        raise ConfigError("need at least one mechanical resonator")
    for name in ("omega_tilde_j", "gamma_j", "nbar_j"):
        if len(getattr(p, name)) != N:
            raise ConfigError(f"{name} must have {N} entries")
    if len(p.eta_j) != N - 1:
        raise ConfigError(f"eta_j must have {N - 1} entries for N={N}")
    positives = {
        "kappa": p.kappa,
        "P_L": p.P_L,
        "omega_L": p.omega_L,
        "omega_c": p.omega_c,
        "L": p.L,
        "omega_fb": p.omega_fb,
    }
    for name, value in positives.items():
        if not value > 0:
            raise ConfigError(f"{name} must be strictly positive, got {value}")
    for name in ("m_j", "omega_tilde_j", "gamma_j"):
        if min(getattr(p, name)) <= 0:
            raise ConfigError(f"all {name} entries must be strictly positive")
    if min(p.nbar_j) < 0:
        raise ConfigError("bath occupancies nbar_j must be non-negative")
    if min(p.eta_j, default=0.0) < 0:
        raise ConfigError("mechanical couplings eta_j must be non-negative")
    if not 0.0 < p.zeta <= 1.0:
        raise ConfigError(f"detection efficiency zeta must lie in (0, 1], got {p.zeta}")
    if p.g_cd < 0:
        raise ConfigError("feedback gain g_cd must be non-negative")


def validate_chain(p: ChainParams) -> None:
    """Raise :class:`ConfigError` on any invalid dimensionless input."""
    N = p.N
    if N < 1:
        raise ConfigError("need at least one mechanical resonator")
    for name in ("gamma_j", "nbar_j"):
        if len(getattr(p, name)) != N:
            raise ConfigError(f"{name} must have {N} entries")
    if len(p.eta_tilde_j) != N - 1:
        raise ConfigError(f"eta_tilde_j must have {N - 1} entries for N={N}")
    if min(p.omega_j) <= 0:
        raise ConfigError("omega_j must be strictly positive")
    if min(p.gamma_j) <= 0:
        raise ConfigError("gamma_j must be strictly positive")
    if p.kappa <= 0 or p.omega_fb <= 0:
        raise ConfigError("kappa and omega_fb must be strictly positive")
    if p.G < 0 or p.g_cd < 0:
        raise ConfigError("G and g_cd must be non-negative")
    if min(p.eta_tilde_j, default=0.0) < 0:
        raise ConfigError("eta_tilde_j must be non-negative")
    if min(p.nbar_j) < 0:
        raise ConfigError("nbar_j must be non-negative")
    if not 0.0 < p.zeta <= 1.0:
        raise ConfigError(f"zeta must lie in (0, 1], got {p.zeta}")
    if p.thermal_mode not in THERMAL_MODES:
        raise ConfigError(f"thermal_mode must be one of {THERMAL_MODES}")
    _check_buckling(p)


def _check_buckling(p: ChainParams) -> None:
    # The static potential of the chain must stay confining; otherwise the
    # resonant effective frequencies acquire imaginary parts.
    w = np.asarray(p.omega_j)
    eta = np.asarray(p.eta_tilde_j)
    if p.N == 2:
        ratio = 4.0 * eta[0] ** 2 / (w[0] * w[1])
        if ratio >= 1.0:
            raise ConfigError(
                "chain buckles: 4*eta_tilde_1^2 / (omega_1*omega_2) = "
                f"{ratio:.6g} >= 1"
            )
        return
    if p.N > 2:
        K = np.diag(w**2)
        for j in range(p.N - 1):
            K[j, j + 1] = K[j + 1, j] = -2.0 * eta[j] * math.sqrt(w[j] * w[j + 1])
        if np.linalg.eigvalsh(K).min() <= 0:
            raise ConfigError("chain buckles: mechanical potential not confining")


def normalized_lab_frequencies(p: PhysicalParams) -> np.ndarray:
    """Normalized mechanical frequencies in rad/s, including the static
    frequency shift from the position-position couplings."""
    N = p.N
    wt = np.asarray(p.omega_tilde_j)
    eta = np.asarray(p.eta_j)
    shift = np.zeros(N)
    if N > 1:
        shift[0] = 2.0 * eta[0] / p.m_j[0]
        shift[-1] = 2.0 * eta[-1] / p.m_j[-1]
        for j in range(1, N - 1):
            shift[j] = 2.0 * (eta[j - 1] + eta[j]) / p.m_j[j]
    return np.sqrt(wt**2 + shift)


def to_dimensionless(p: PhysicalParams, thermal_mode: str = "markovian") -> ChainParams:
    """Convert lab-frame inputs to the dimensionless working set.

    The linearized optomechanical coupling follows from the steady-state
    cavity amplitude at zero detuning: ``G = sqrt(2) * lam_tilde * Omega / kappa``
    with drive amplitude ``Omega = sqrt(2 P_L kappa / (hbar omega_L))`` and
    single-photon radiation-pressure coupling
    ``lam_tilde = (omega_c / L) * sqrt(hbar / (m_1 omega_1))``.
    """
    validate_physical(p)
    w_lab = normalized_lab_frequencies(p)
    m = np.asarray(p.m_j)
    eta = np.asarray(p.eta_j)
    if p.N > 1:
        eta_tilde_lab = eta / np.sqrt(m[:-1] * m[1:] * w_lab[:-1] * w_lab[1:])
    else:
        eta_tilde_lab = np.zeros(0)

    lam_tilde = (p.omega_c / p.L) * math.sqrt(HBAR / (m[0] * w_lab[0]))
    drive = math.sqrt(2.0 * p.P_L * p.kappa / (HBAR * p.omega_L))
    G_lab = math.sqrt(2.0) * lam_tilde * drive / p.kappa

    w_ref = w_lab[0]
    chain = ChainParams(
        omega_j=tuple(w_lab / w_ref),
        gamma_j=tuple(np.asarray(p.gamma_j) / w_ref),
        eta_tilde_j=tuple(eta_tilde_lab / w_ref),
        kappa=p.kappa / w_ref,
        G=G_lab / w_ref,
        g_cd=p.g_cd,
        omega_fb=p.omega_fb / w_ref,
        zeta=p.zeta,
        nbar_j=tuple(p.nbar_j),
        thermal_mode=thermal_mode,
    )
    validate_chain(chain)
    return chain


def nbar_from_temperature(T: float, omega_lab: float) -> float:
    """Bose occupancy of a bath at temperature ``T`` (K) seen by a mode at
    ``omega_lab`` (rad/s)."""
    if T <= 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_lab / (KB * T))


# --------------------------------------------------------------------------
# Config files: plain "key = value" text with a [physical] or [dimensionless]
# section header (or an explicit mode key); arrays are comma lists.

_PHYSICAL_KEYS = {
    "m_j", "omega_tilde_j", "eta_j", "kappa", "P_L", "omega_L", "omega_c",
    "L", "gamma_j", "nbar_j", "T_j", "zeta", "g_cd", "omega_fb", "Delta",
    "thermal_mode",
}
_DIMENSIONLESS_KEYS = {
    "N", "omega_j", "gamma_j", "eta_tilde_j", "kappa", "G", "g_cd",
    "omega_fb", "zeta", "nbar_j", "thermal_mode", "Delta",
}
_VECTOR_KEYS = {"m_j", "omega_tilde_j", "eta_j", "gamma_j", "nbar_j", "T_j",
                "omega_j", "eta_tilde_j"}


def _parse_value(text: str, lineno: int):
    text = text.strip()
    if not text:
        raise ConfigError(f"line {lineno}: empty value")
    if text.startswith(('"', "'")) and text.endswith(text[0]) and len(text) >= 2:
        return text[1:-1]
    if "," in text:
        try:
            return tuple(float(tok) for tok in text.split(","))
        except ValueError:
            raise ConfigError(f"line {lineno}: cannot parse list {text!r}") from None
    try:
        return float(text)
    except ValueError:
        return text


def _read_config(path) -> tuple[str, dict]:
    mode = None
    data: dict[str, object] = {}
    lines: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise ConfigError(f"line {lineno}: malformed section header {line!r}")
                section = line[1:-1].strip().lower()
                if section not in ("physical", "dimensionless"):
                    raise ConfigError(f"line {lineno}: unknown section [{section}]")
                if mode is not None and section != mode:
                    raise ConfigError(
                        f"line {lineno}: mixed-mode config ([{mode}] and [{section}])"
                    )
                mode = section
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key == "mode":
                requested = str(_parse_value(value, lineno)).lower()
                if requested not in ("physical", "dimensionless"):
                    raise ConfigError(f"line {lineno}: unknown mode {requested!r}")
                if mode is not None and requested != mode:
                    raise ConfigError(f"line {lineno}: mixed-mode config")
                mode = requested
                continue
            if key in data:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            data[key] = _parse_value(value, lineno)
            lines[key] = lineno
    if mode is None:
        raise ConfigError("config does not declare [physical], [dimensionless] or mode")
    allowed = _PHYSICAL_KEYS if mode == "physical" else _DIMENSIONLESS_KEYS
    for key in data:
        if key not in allowed:
            raise ConfigError(f"line {lines[key]}: unknown key {key!r} in {mode} config")
    return mode, data


def _broadcast(value, n: int, key: str) -> tuple[float, ...]:
    tup = _as_tuple(value)
    if len(tup) == 1 and n > 1:
        return tup * n
    if len(tup) != n:
        raise ConfigError(f"{key} must have {n} entries, got {len(tup)}")
    return tup


def load_config(path) -> PhysicalParams | ChainParams:
    """Load a config file and return the corresponding parameter set.

    Missing ``zeta`` defaults to 0.8 with a logged notice.  In a physical
    config, bath occupancies may be given either directly (``nbar_j``) or
    as temperatures (``T_j``).
    """
    mode, data = _read_config(path)

    delta = data.pop("Delta", 0.0)
    if delta != 0.0:
        raise ConfigError(
            "Delta != 0 is not supported: cold-damping feedback operates at "
            "zero effective detuning"
        )
    if "zeta" not in data:
        log.info("config %s: zeta not given, defaulting to %s", path, DEFAULT_ZETA)
        data["zeta"] = DEFAULT_ZETA

    if mode == "physical":
        return _build_physical(data)
    return _build_chain(data)


def _build_physical(data: dict) -> PhysicalParams:
    required = {"m_j", "omega_tilde_j", "kappa", "P_L", "omega_L", "omega_c",
                "L", "gamma_j", "g_cd", "omega_fb"}
    missing = sorted(required - data.keys())
    if missing:
        raise ConfigError(f"physical config missing keys: {', '.join(missing)}")
    thermal_mode = str(data.pop("thermal_mode", "markovian"))
    m_j = _as_tuple(data["m_j"])
    N = len(m_j)
    eta_j = _as_tuple(data.get("eta_j", ())) if N > 1 else ()
    if N > 1 and "eta_j" not in data:
        raise ConfigError("physical config with N > 1 requires eta_j")
    if N > 1 and len(eta_j) == 1 and N - 1 > 1:
        eta_j = eta_j * (N - 1)

    temps = data.get("T_j")
    if "nbar_j" in data and temps is not None:
        raise ConfigError("give either nbar_j or T_j, not both")

    kwargs = dict(
        m_j=m_j,
        omega_tilde_j=_broadcast(data["omega_tilde_j"], N, "omega_tilde_j"),
        eta_j=eta_j,
        kappa=float(data["kappa"]),
        P_L=float(data["P_L"]),
        omega_L=float(data["omega_L"]),
        omega_c=float(data["omega_c"]),
        L=float(data["L"]),
        gamma_j=_broadcast(data["gamma_j"], N, "gamma_j"),
        g_cd=float(data["g_cd"]),
        omega_fb=float(data["omega_fb"]),
        zeta=float(data["zeta"]),
        nbar_j=(0.0,) * N,
    )
    if temps is not None:
        probe = PhysicalParams(**kwargs)
        validate_physical(probe)
        w_lab = normalized_lab_frequencies(probe)
        T_j = _broadcast(temps, N, "T_j")
        kwargs["nbar_j"] = tuple(
            nbar_from_temperature(T, w) for T, w in zip(T_j, w_lab)
        )
    elif "nbar_j" in data:
        kwargs["nbar_j"] = _broadcast(data["nbar_j"], N, "nbar_j")
    else:
        raise ConfigError("physical config requires nbar_j or T_j")

    p = PhysicalParams(**kwargs)
    validate_physical(p)
    if thermal_mode not in THERMAL_MODES:
        raise ConfigError(f"thermal_mode must be one of {THERMAL_MODES}")
    # stash the requested bath convention for the caller-side conversion
    object.__setattr__(p, "_thermal_mode", thermal_mode)
    return p


def _build_chain(data: dict) -> ChainParams:
    required = {"omega_j", "gamma_j", "kappa", "G", "g_cd", "omega_fb", "nbar_j"}
    missing = sorted(required - data.keys())
    if missing:
        raise ConfigError(f"dimensionless config missing keys: {', '.join(missing)}")
    omega_j = _as_tuple(data["omega_j"])
    N = int(data.get("N", len(omega_j)))
    if N != len(omega_j) and len(omega_j) == 1:
        omega_j = omega_j * N
    elif N != len(omega_j):
        raise ConfigError(f"N={N} inconsistent with omega_j of length {len(omega_j)}")
    eta = _as_tuple(data.get("eta_tilde_j", ())) if N > 1 else ()
    if N > 1:
        if "eta_tilde_j" not in data:
            raise ConfigError("dimensionless config with N > 1 requires eta_tilde_j")
        if len(eta) == 1 and N - 1 > 1:
            eta = eta * (N - 1)
    p = ChainParams(
        omega_j=omega_j,
        gamma_j=_broadcast(data["gamma_j"], N, "gamma_j"),
        eta_tilde_j=eta,
        kappa=float(data["kappa"]),
        G=float(data["G"]),
        g_cd=float(data["g_cd"]),
        omega_fb=float(data["omega_fb"]),
        zeta=float(data["zeta"]),
        nbar_j=_broadcast(data["nbar_j"], N, "nbar_j"),
        thermal_mode=str(data.get("thermal_mode", "markovian")),
    )
    validate_chain(p)
    return p


def chain_from(params, thermal_mode: str | None = None) -> ChainParams:
    """Coerce either parameter set to :class:`ChainParams`."""
    if isinstance(params, ChainParams):
        if thermal_mode is not None and thermal_mode != params.thermal_mode:
            from dataclasses import replace

            p = replace(params, thermal_mode=thermal_mode)
            validate_chain(p)
            return p
        return params
    mode = thermal_mode or getattr(params, "_thermal_mode", "markovian")
    return to_dimensionless(params, thermal_mode=mode)
