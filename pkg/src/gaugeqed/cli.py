"""Command-line sweeps writing CSV datasets."""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

from . import selftest as selftest_mod
from .dynamics import SwitchProtocol, propagate
from .errors import ConfigError, GaugeQEDError, OutputPathError
from .hamiltonians import (
    BUILDERS,
    CircuitParams,
    Gauge,
    RabiParams,
    build_coulomb,
    build_dipole,
)
from .hilbert import HilbertSpec, basis_state, default_cutoff
from .observables import (
    circuit_voltage_rates,
    entanglement_entropy,
    ground_photon_number,
    photodetection_W,
    photodetection_Wprime,
    qubit_population,
)
from .readout import ReadoutParams, chi_numeric
from .spectra import diagonalize, diagonalize_converged, label_sweep

COMMANDS = ("spectrum", "photodetect", "readout", "vacuum", "entropy", "circuit", "switch", "selftest")
TAG = {Gauge.COULOMB: "C", Gauge.DIPOLE: "D", Gauge.FLUX: "fg", Gauge.CHARGE: "cg"}
DEFAULTS = {
    "eta": "0:0.05:2",
    "omega0": 1.0,
    "theta": 0.0,
    "gauge": None,
    "cutoff": None,
    "out": None,
    "ramp": 1e-3,
    "shape": "cosine",
    "n_levels": 8,
    "omega_b": 0.02,
    "g_b": 0.02,
    "protocol": "off",
    "plateau": 2 * math.pi,
}


def parse_grid(text: str) -> list[float]:
    """'start:step:end' (inclusive), a comma list, or a single value."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, step, end = (float(v) for v in text.split(":"))
            if not step > 0 or end < start:
                raise ConfigError(f"invalid grid {text!r}: need step > 0 and end >= start")
            n = int(math.floor((end - start) / step + 1e-9)) + 1
            return [float(f"{start + i * step:.12g}") for i in range(n)]
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}") from exc
    if not values or any(v < 0 for v in values):
        raise ConfigError(f"invalid grid {text!r}")
    return values


def read_config(path: str) -> dict[str, str]:
    """Flat key=value file; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    value = float(value)
    return format(value + 0.0 if value == 0 else value, ".12g")


def write_csv(path: str | None, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    text = ",".join(header) + "\n" + "".join(",".join(fmt(v) for v in row) + "\n" for row in rows)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputPathError(f"cannot write {path}: {exc}") from exc


def check_writable(path: str | None) -> None:
    if path in (None, "-"):
        return
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        raise OutputPathError(f"output directory {directory} is not writable")
    if os.path.isdir(path):
        raise OutputPathError(f"{path} is a directory")


def worker_map(fn: Callable, items: Sequence) -> list:
    """Ordered parallel map; the pool size is capped by GAUGEQED_THREADS."""
    try:
        cap = int(os.environ.get("GAUGEQED_THREADS", "0"))
    except ValueError:
        raise ConfigError("GAUGEQED_THREADS must be an integer")
    workers = cap if cap > 0 else (os.cpu_count() or 1)
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _label_token(label: str) -> str:
    return label.replace("-", "m").replace("+", "p")


def _ladder_labels(n_levels: int) -> list[str]:
    labels = []
    k = 1
    while len(labels) < n_levels - 1:
        labels += [f"{k}-", f"{k}+"]
        k += 1
    return labels[: n_levels - 1]


def _level_value(sp, label, fn):
    try:
        return fn(sp, label)
    except KeyError:
        return float("nan")


def cmd_spectrum(cfg) -> tuple[list, list]:
    gauges = _gauges(cfg, default="both")
    etas = cfg["etas"]
    labels = _ladder_labels(cfg["n_levels"])
    header = ["eta", "omega_ratio"]
    columns = []
    for g in gauges:
        sweep = label_sweep(BUILDERS[g], _params(cfg, g, 0.0), etas, cfg["n_levels"], n_fock=cfg["cutoff"])
        header += [f"dE_{_label_token(lab)}_{TAG[g]}" for lab in labels]
        columns.append([[_level_value(sp, lab, lambda s, l: s.gaps()[s.index(l)]) for lab in labels]
                        for sp in sweep])
    rows = [[eta, cfg["omega0"]] + sum((col[i] for col in columns), []) for i, eta in enumerate(etas)]
    return header, rows


def cmd_photodetect(cfg):
    etas = cfg["etas"]
    params = RabiParams(0.0, omega_0=cfg["omega0"])
    sweep_c = label_sweep(build_coulomb, params, etas, 4, n_fock=cfg["cutoff"])
    sweep_d = label_sweep(build_dipole, params, etas, 4, n_fock=cfg["cutoff"])
    rows = []
    for eta, sc, sd in zip(etas, sweep_c, sweep_d):
        rows.append([
            eta, cfg["omega0"],
            _level_value(sc, "1+", lambda s, l: photodetection_W(s, l, "0")),
            _level_value(sc, "1-", lambda s, l: photodetection_W(s, l, "0")),
            _level_value(sd, "1+", lambda s, l: photodetection_Wprime(s, l, "0")),
            _level_value(sd, "1-", lambda s, l: photodetection_Wprime(s, l, "0")),
        ])
    return ["eta", "omega_ratio", "W_1p", "W_1m", "Wp_1p", "Wp_1m"], rows


def cmd_readout(cfg):
    etas = cfg["etas"]
    rp = ReadoutParams(omega_b=cfg["omega_b"], g_b=cfg["g_b"], omega_0=cfg["omega0"])

    def point(eta):
        params = RabiParams(eta, omega_0=cfg["omega0"])
        sp = diagonalize_converged(build_coulomb, params, 4, n_fock=cfg["cutoff"])
        res = chi_numeric(params, rp, 0, n_fock=sp.spec.n_fock)
        return [
            eta, cfg["omega0"],
            qubit_population(sp, 0, Gauge.COULOMB), qubit_population(sp, 0, Gauge.DIPOLE),
            res.sigma_z_dipole, res.shift, res.chi, res.ratio,
        ]

    header = ["eta", "omega_ratio", "P0_C", "P0_D", "sz0_D", "shift_b", "chi", "shift_over_chi"]
    return header, worker_map(point, etas)


def _ground_pair(cfg, eta):
    params = RabiParams(eta, omega_0=cfg["omega0"])
    sc = diagonalize_converged(build_coulomb, params, 4, n_fock=cfg["cutoff"])
    sd = diagonalize_converged(build_dipole, params, 4, n_fock=cfg["cutoff"])
    return sc, sd


def cmd_vacuum(cfg):
    def point(eta):
        sc, sd = _ground_pair(cfg, eta)
        return [eta, cfg["omega0"], ground_photon_number(sc, Gauge.COULOMB),
                ground_photon_number(sd, Gauge.DIPOLE)]

    return ["eta", "omega_ratio", "n0_C", "n0_Dnaive"], worker_map(point, cfg["etas"])


def cmd_entropy(cfg):
    def point(eta):
        sc, sd = _ground_pair(cfg, eta)
        return [eta, cfg["omega0"], entanglement_entropy(sc.state(0)), entanglement_entropy(sd.state(0))]

    return ["eta", "omega_ratio", "S0_C", "S0_D"], worker_map(point, cfg["etas"])


def _voltage_rates(sp, label) -> dict[str, float]:
    try:
        return circuit_voltage_rates(sp, label, "0")
    except KeyError:
        return {"V_L_rate": float("nan"), "V_C_rate": float("nan")}


def cmd_circuit(cfg):
    (gauge,) = _gauges(cfg, default="flux", allowed=(Gauge.FLUX, Gauge.CHARGE))
    params = CircuitParams(0.0, omega_0=cfg["omega0"], theta=cfg["theta"])
    sweep = label_sweep(BUILDERS[gauge], params, cfg["etas"], 4, n_fock=cfg["cutoff"])
    rows = []
    for eta, sp in zip(cfg["etas"], sweep):
        rates = {lab: _voltage_rates(sp, lab) for lab in ("1-", "1+")}
        photons = ground_photon_number(sp, Gauge.FLUX)
        rows.append([eta, cfg["omega0"], cfg["theta"],
                     rates["1-"]["V_L_rate"], rates["1+"]["V_L_rate"],
                     rates["1-"]["V_C_rate"], rates["1+"]["V_C_rate"],
                     photons, entanglement_entropy(sp.state(0))])
    header = ["eta", "omega_ratio", "theta", "VL_1m", "VL_1p", "VC_1m", "VC_1p", "n0_fg", "S0_" + TAG[gauge]]
    return header, rows


def switch_runs(eta: float, omega0: float, ramp: float, shape: str, protocol: str,
                plateau: float, gauges: Sequence[str], cutoff: int | None = None):
    """Propagate the requested gauges through one switching protocol.

    ``ramp`` is in units of the cavity period 2 pi / omega_c. Gauge "naive"
    is the dipole gauge without the -lambda_dot F term.
    """
    params = RabiParams(eta, omega_0=omega0)
    period = 2 * math.pi / params.omega_c
    T = ramp * period
    n_fock = cutoff or max(40, default_cutoff(eta))
    spec = HilbertSpec(n_fock)
    if protocol == "off":
        prot = SwitchProtocol.switch_off(1.0, T, 1.0 + T + 2 * period, shape)
    elif protocol == "onoff":
        prot = SwitchProtocol.on_off(1.0, 1.0 + T + plateau, T, 1.0 + 2 * T + plateau + 2 * period, shape)
    else:
        raise ConfigError(f"unknown protocol {protocol!r}")
    results = {}
    for name in gauges:
        gauge = Gauge.DIPOLE if name == "naive" else Gauge(name)
        if protocol == "off":
            initial = diagonalize(BUILDERS[gauge](params, spec)).states[:, 0]
        else:
            initial = basis_state("g", 0, spec)
        results[name] = propagate(initial, gauge, params, prot, spec, switch_term=(name != "naive"))
    t_after = prot.segments()[-1][0]
    return results, t_after


def cmd_switch(cfg):
    etas = cfg["etas"]
    if len(etas) != 1:
        raise ConfigError("switch takes a single --eta value")
    choice = cfg["gauge"] or "both"
    gauges = {"both": ["coulomb", "dipole"], "all": ["coulomb", "dipole", "naive"]}.get(choice, [choice])
    for g in gauges:
        if g not in ("coulomb", "dipole", "naive"):
            raise ConfigError(f"switch supports coulomb, dipole, naive, both or all; got {g!r}")
    results, t_after = switch_runs(etas[0], cfg["omega0"], cfg["ramp"], cfg["shape"], cfg["protocol"],
                                   cfg["plateau"], gauges, cfg["cutoff"])
    rows = []
    for name, res in results.items():
        for i, t in enumerate(res.times):
            rows.append([name, t, res.lambdas[i], res.emission[i], res.photon_number[i], res.qubit_population[i]])
        print(f"{name}: post-switch mean emission {res.mean_after(t_after, 'emission'):.12g}, "
              f"photon number {res.mean_after(t_after):.12g}", file=sys.stderr)
    return ["gauge", "t", "lambda", "emission", "photon_number", "qubit_population"], rows


def _gauges(cfg, default: str, allowed=tuple(Gauge)) -> list[Gauge]:
    choice = cfg["gauge"] or default
    if choice == "both":
        gauges = [Gauge.COULOMB, Gauge.DIPOLE]
    else:
        try:
            gauges = [Gauge(choice)]
        except ValueError:
            raise ConfigError(f"unknown gauge {choice!r}")
    if any(g not in allowed for g in gauges):
        raise ConfigError(f"gauge {choice!r} not supported by this command")
    return gauges


def _params(cfg, gauge: Gauge, eta: float):
    if gauge.family == "cavity":
        return RabiParams(eta, omega_0=cfg["omega0"])
    return CircuitParams(eta, omega_0=cfg["omega0"], theta=cfg["theta"])


HANDLERS = {
    "spectrum": cmd_spectrum,
    "photodetect": cmd_photodetect,
    "readout": cmd_readout,
    "vacuum": cmd_vacuum,
    "entropy": cmd_entropy,
    "circuit": cmd_circuit,
    "switch": cmd_switch,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaugeqed", description="Gauge-consistent cavity and circuit QED sweeps.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key=value file; command-line flags take precedence")
    parser.add_argument("--eta", help="coupling grid start:step:end, comma list or single value")
    parser.add_argument("--omega0", type=float, help="qubit frequency in units of omega_c")
    parser.add_argument("--theta", type=float, help="flux angle (circuit command)")
    parser.add_argument("--gauge", help="coulomb|dipole|flux|charge|both (switch also: naive|all)")
    parser.add_argument("--cutoff", type=int, help="Fock cutoff override")
    parser.add_argument("--out", help="CSV path (default stdout)")
    parser.add_argument("--ramp", type=float, help="switch ramp duration in cavity periods")
    parser.add_argument("--shape", choices=("linear", "cosine"), help="ramp shape")
    parser.add_argument("--n-levels", dest="n_levels", type=int, help="levels in the spectrum command")
    parser.add_argument("--omega-b", dest="omega_b", type=float, help="readout mode frequency")
    parser.add_argument("--g-b", dest="g_b", type=float, help="readout coupling")
    parser.add_argument("--protocol", choices=("off", "onoff"), help="switch protocol")
    parser.add_argument("--plateau", type=float, help="on-off plateau duration (units 1/omega_c)")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    try:
        cfg = {
            "etas": parse_grid(merged["eta"]),
            "omega0": float(merged["omega0"]),
            "theta": float(merged["theta"]),
            "gauge": merged["gauge"],
            "cutoff": int(merged["cutoff"]) if merged["cutoff"] not in (None, "") else None,
            "out": merged["out"],
            "ramp": float(merged["ramp"]),
            "shape": merged["shape"],
            "n_levels": int(merged["n_levels"]),
            "omega_b": float(merged["omega_b"]),
            "g_b": float(merged["g_b"]),
            "protocol": merged["protocol"],
            "plateau": float(merged["plateau"]),
        }
    except GaugeQEDError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc
    if cfg["omega0"] < 0 or not cfg["ramp"] > 0 or cfg["n_levels"] < 2:
        raise ConfigError("omega0 must be >= 0, ramp > 0 and n_levels >= 2")
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return selftest_mod.run(stream=sys.stdout)
        cfg = resolve_config(args)
        check_writable(cfg["out"])
        header, rows = HANDLERS[args.command](cfg)
        write_csv(cfg["out"], header, rows)
    except GaugeQEDError as exc:
        print(f"gaugeqed: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
