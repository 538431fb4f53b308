"""Command-line front end: config parsing, orchestration, CSV/JSON output.

Subcommands: spectrum, actions, drive, gate, encode, selectivity, birkhoff,
robustness.  Experiments are described by a JSON config validated against
the schema shipped with the package; identical config + seed produce
byte-identical outputs (17 significant digits, '.' decimal, LF endings,
atomic writes).  Exit codes: 0 success, 1 config errors, 2 domain errors,
3 convergence/quadrature errors.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import action_oracle, birkhoff, drive, encodings, gates, robustness, spectra
from .errors import (ActionGateError, ConfigError, ConvergenceError,
                     DomainError, QuadratureError)

_SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schema",
                            "config.schema.json")

SUBCOMMANDS = ("spectrum", "actions", "drive", "gate", "encode",
               "selectivity", "birkhoff", "robustness")


def _fmt(x) -> str:
    """Fixed 17-significant-digit decimal rendering for CSV cells."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _atomic_write(path, text):
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-actiongate-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path, header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    _atomic_write(path, buf.getvalue())


def _write_json(path, obj):
    _atomic_write(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


@dataclass
class ExperimentConfig:
    """Validated configuration plus run-level options."""

    subcommand: str
    raw: dict
    seed: int
    out_dir: str
    tolerances: dict
    threads: int

    def section(self, name, required=False):
        if required and name not in self.raw:
            raise ConfigError(f"section {name!r} is required for "
                              f"{self.subcommand}", field=name)
        return self.raw.get(name, {})

    def tol(self, name, default):
        return float(self.tolerances.get(name, default))


def load_config(path, subcommand, seed_override=None, out_dir="out",
                tol_overrides=()):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", field="--config")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", field="--config")
    with open(_SCHEMA_PATH) as fh:
        schema = json.load(fh)
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        field = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config field {field}: {err.message}", field=field)
    tolerances = dict(raw.get("tolerances", {}))
    for item in tol_overrides:
        if "=" not in item:
            raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}",
                              field="--tol")
        name, value = item.split("=", 1)
        try:
            tolerances[name] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name}: {value!r} is not a number",
                              field="--tol")
    seed = int(raw.get("seed", 0)) if seed_override is None else seed_override
    threads_env = os.environ.get("ACTIONGATE_THREADS", "1")
    try:
        threads = max(1, int(threads_env))
    except ValueError:
        raise ConfigError("ACTIONGATE_THREADS must be an integer",
                          field="ACTIONGATE_THREADS")
    return ExperimentConfig(subcommand, raw, seed, out_dir, tolerances, threads)


def _model_from(cfg) -> spectra.ModelSpec:
    sec = cfg.section("model", required=True)
    try:
        return spectra.ModelSpec(
            kind=sec["kind"], m=sec.get("m", 1.0), omega=sec.get("omega", 1.0),
            c=sec.get("c", 0.0), k=sec.get("k", 1.0), beta=sec.get("beta", 0.0),
            hbar=sec.get("hbar", 1.0), dimension=sec.get("dimension", 3))
    except DomainError as exc:
        raise ConfigError(str(exc), field="model")


def _ladder_basis(model, levels):
    """1D radial ladder: the lowest ``levels`` states at frozen angular numbers."""
    energies = tuple(
        spectra.energy_quantum(model, spectra.QuantumNumbers(nr))
        for nr in range(levels))
    return drive.Basis(energies, hbar=model.hbar)


def _control_from(cfg, dim):
    sec = cfg.section("control")
    kind = sec.get("kind", "ladder")
    if kind == "ladder":
        return drive.ControlMatrix.uniform_ladder(dim, sec.get("strength", 1.0))
    matrix = sec.get("matrix")
    if matrix is None:
        raise ConfigError("explicit control needs a matrix", field="control.matrix")
    a = np.array([[complex(re, im) for re, im in row] for row in matrix])
    if a.shape != (dim, dim):
        raise ConfigError(f"control matrix must be {dim}x{dim}",
                          field="control.matrix")
    return drive.ControlMatrix(a)


# ---------------------------------------------------------------------------
# subcommand pipelines; each returns {output name: writer thunk}
# ---------------------------------------------------------------------------

def _run_spectrum(cfg):
    model = _model_from(cfg)
    sec = cfg.section("spectrum")
    levels = spectra.enumerate_levels(model, sec.get("n_max", 3),
                                      anharmonic_form=sec.get("anharmonic_form",
                                                              "exact"))
    group_of = {}
    for g, members in enumerate(levels.groups):
        for idx in members:
            group_of[idx] = g
    rows = [(qn.n_r, qn.n_theta, qn.n_phi, qn.l, qn.n, e, group_of[i])
            for i, (qn, e) in enumerate(levels.entries)]
    header = ("n_r", "n_theta", "n_phi", "l", "n", "energy", "degeneracy_group")
    path = os.path.join(cfg.out_dir, "spectrum.csv")
    _write_csv(path, header, rows)
    return [path]


def _run_actions(cfg):
    model = _model_from(cfg)
    sec = cfg.section("actions")
    orbits = [action_oracle.OrbitSpec(model, o["energy"], o["l"], o["lz"])
              for o in sec.get("orbits", [])]
    if "sweep_count" in sec:
        orbits.extend(action_oracle.random_orbits(model, sec["sweep_count"],
                                                  cfg.seed))
    if not orbits:
        raise ConfigError("actions needs orbits or sweep_count",
                          field="actions")
    rows = []
    for orbit in orbits:
        res = action_oracle.action_integrals(orbit)
        residual = abs(spectra._energy_classical_raw(model, *res.actions.astuple())
                       - orbit.energy) / abs(orbit.energy)
        rows.append((orbit.energy, orbit.l_total, orbit.l_z, res.actions.j_r,
                     res.actions.j_theta, res.actions.j_phi, residual))
    path = os.path.join(cfg.out_dir, "actions.csv")
    _write_csv(path, ("E", "L", "Lz", "Jr", "Jtheta", "Jphi", "residual"), rows)
    return [path]


def _resolve_drive(cfg, basis, pair):
    sec = cfg.section("drive")
    omega_d = sec.get("omega_d", "auto")
    if omega_d == "auto":
        omega_d = abs(basis.omega(pair[0], pair[1]))
    return drive.DriveSpec(sec.get("epsilon", 1e-3), float(omega_d),
                           sec.get("phi", 0.0))


def _run_drive(cfg):
    model = _model_from(cfg)
    sec = cfg.section("drive", required=True)
    basis = _ladder_basis(model, sec.get("levels", 3))
    control = _control_from(cfg, basis.dim)
    pair = tuple(sec.get("target_pair", (1, 0)))
    spec = _resolve_drive(cfg, basis, pair)
    total = sec.get("time", 10.0)
    samples = sec.get("samples", 101)
    steps = sec.get("steps_per_sample", 64)
    n = basis.dim
    ts = np.linspace(0.0, total, samples)
    build = drive._builder(basis, control, spec, "full")
    u = np.eye(n, dtype=complex)
    rows = []
    header = ["t"]
    for i in range(n):
        for j in range(n):
            header += [f"re_u_{i}{j}", f"im_u_{i}{j}"]
    header.append("p_target")
    for idx, t in enumerate(ts):
        if idx > 0:
            u = drive.propagate_stepped(build, ts[idx - 1], t, steps,
                                        basis.hbar) @ u
        row = [t]
        for i in range(n):
            for j in range(n):
                row += [u[i, j].real, u[i, j].imag]
        row.append(abs(u[pair[0], pair[1]]) ** 2)
        rows.append(row)
    csv_path = os.path.join(cfg.out_dir, "drive_timeseries.csv")
    _write_csv(csv_path, header, rows)
    report = drive.rwa_validity_report(basis, control, spec, pair,
                                       threshold=cfg.tol("guard", 0.05))
    json_path = os.path.join(cfg.out_dir, "rwa_report.json")
    _write_json(json_path, {
        "target": list(report.target),
        "threshold": report.threshold,
        "collision_tol": report.collision_tol,
        "rows": [{"kind": r.kind, "pair": list(r.pair), "value": r.value}
                 for r in report.rows],
        "flagged": [{"kind": r.kind, "pair": list(r.pair), "value": r.value}
                    for r in report.flagged],
    })
    return [csv_path, json_path]


def _run_gate(cfg):
    model = _model_from(cfg)
    sec = cfg.section("gate", required=True)
    target = sec.get("target", "H")
    epsilon = sec.get("epsilon", 1e-3)
    engine = sec.get("engine", "exact")
    if target == "CNOT":
        basis = _ladder_basis(model, 4)
        control = _control_from(cfg, 4)
        schedule = gates.cnot_schedule(basis, control, epsilon,
                                       sec.get("epsilon_s", epsilon))
        ideal = gates.standard_gate("CNOT").canonical
        u = gates.execute_schedule(basis, control, schedule, engine=engine,
                                   dt=sec.get("dt"))
        fid = gates.fidelity(ideal, u)
    else:
        basis = _ladder_basis(model, sec.get("levels", 3))
        control = _control_from(cfg, basis.dim)
        schedule = gates.single_qubit_schedule(target, basis, control, (1, 0),
                                               epsilon)
        u = gates.execute_schedule(basis, control, schedule, engine=engine,
                                   dt=sec.get("dt"))
        ideal = gates.standard_gate(target).canonical
        fid = gates.fidelity(ideal, u[:2, :2])
    path = os.path.join(cfg.out_dir, "gate_schedule.json")
    _write_json(path, {
        "target": target,
        "engine": engine,
        "fidelity": fid,
        "segments": [{
            "omega_d": s.drive.omega_d,
            "phi": s.drive.phi,
            "epsilon": s.drive.epsilon,
            "duration": s.duration,
            "pair": list(s.pair),
        } for s in schedule.segments],
    })
    return [path]


def _encoding_from(cfg, model):
    sec = cfg.section("encoding", required=True)
    zero = tuple(spectra.QuantumNumbers(*lbl) for lbl in sec["zero"])
    one = tuple(spectra.QuantumNumbers(*lbl) for lbl in sec["one"])
    count = len(zero)
    try:
        spec = encodings.EncodingSpec(sec["variant"], zero, one,
                                      (model,) * count)
    except DomainError as exc:
        raise ConfigError(str(exc), field="encoding")
    return spec, sec.get("cutoff", 3)


def _run_encode(cfg):
    model = _model_from(cfg)
    spec, cutoff = _encoding_from(cfg, model)
    basis, labels = encodings.build_encoding_basis(spec, cutoff)
    omega10 = basis.omega(labels.one_index, labels.zero_index)
    path = os.path.join(cfg.out_dir, "encoding.json")
    _write_json(path, {
        "variant": spec.variant,
        "zero_index": labels.zero_index,
        "one_index": labels.one_index,
        "omega_10": omega10,
        "levels": [{"label": [list(part) for part in lbl], "energy": e}
                   for lbl, e in zip(labels.level_labels, basis.energies)],
    })
    return [path]


def _run_selectivity(cfg):
    model = _model_from(cfg)
    spec, cutoff = _encoding_from(cfg, model)
    basis, labels = encodings.build_encoding_basis(spec, cutoff)
    control = _control_from(cfg, basis.dim)
    sec = cfg.section("selectivity")
    report = encodings.selectivity_check(
        basis, control, (labels.one_index, labels.zero_index),
        sec.get("epsilon", 1e-3), guard=cfg.tol("guard", sec.get("guard", 0.05)))
    path = os.path.join(cfg.out_dir, "selectivity.json")
    _write_json(path, {
        "verdict": report.verdict,
        "target": list(report.target),
        "omega_target": report.omega_target,
        "guard": report.guard,
        "collision_tol": report.collision_tol,
        "spurious": [{
            "pair": list(s.pair),
            "detuning": s.detuning,
            "coupling": s.coupling,
            "leakage_ratio": (s.leakage_ratio if math.isfinite(s.leakage_ratio)
                              else "inf"),
        } for s in report.spurious],
    })
    return [path]


def _run_birkhoff(cfg):
    model = _model_from(cfg)
    sec = cfg.section("birkhoff", required=True)
    j = list(sec["actions"]) + [0.0] * (3 - len(sec["actions"]))
    point = birkhoff.TorusPoint(spectra.ClassicalActions(*j))
    coeffs = birkhoff.taylor_expand(model, point)
    det = birkhoff.nondegeneracy_determinant(coeffs)
    relations = birkhoff.incommensurability_check(
        coeffs.gradient, sec.get("k_max", 4), sec.get("tol", 1e-9))
    json_path = os.path.join(cfg.out_dir, "birkhoff_expansion.json")
    _write_json(json_path, {
        "h0": coeffs.h0,
        "gradient": list(coeffs.gradient),
        "hessian": [list(row) for row in coeffs.hessian],
        "determinant": det,
        "resonances": [list(r) for r in relations],
    })
    cutoffs = sec.get("cutoffs", [2] * model.dimension)
    quant = birkhoff.quantize_truncated(coeffs, tuple(cutoffs),
                                        hbar=model.hbar,
                                        convention=sec.get("convention",
                                                           "number_operator"))
    rows = [list(dn) + [e] for dn, e in quant.spectrum()]
    header = [f"dn_{i}" for i in range(len(quant.cutoffs))] + ["energy"]
    csv_path = os.path.join(cfg.out_dir, "birkhoff_spectrum.csv")
    _write_csv(csv_path, header, rows)
    return [json_path, csv_path]


def _run_robustness(cfg):
    model = _model_from(cfg)
    sec = cfg.section("robustness", required=True)
    basis = _ladder_basis(model, sec.get("levels", 2))
    control = _control_from(cfg, basis.dim)
    schedule = gates.single_qubit_schedule(sec.get("gate", "X"), basis, control,
                                           (1, 0), sec.get("epsilon", 1e-2))
    pert = robustness.PerturbationSpec(1.0, cfg.seed,
                                       sec.get("structure", "dense"),
                                       sec.get("bandwidth", 1))
    points = robustness.fidelity_sweep(basis, control, schedule, pert,
                                       sec["epsilon2_grid"], dt=sec.get("dt"))
    rows = [(p.epsilon2, p.fidelity, p.min_overlap, p.persist_fraction)
            for p in points]
    path = os.path.join(cfg.out_dir, "robustness.csv")
    _write_csv(path, ("epsilon2", "fidelity", "min_overlap", "persist_fraction"),
               rows)
    return [path]


_PIPELINES = {
    "spectrum": _run_spectrum,
    "actions": _run_actions,
    "drive": _run_drive,
    "gate": _run_gate,
    "encode": _run_encode,
    "selectivity": _run_selectivity,
    "birkhoff": _run_birkhoff,
    "robustness": _run_robustness,
}


def execute(cfg: ExperimentConfig, dry_run=False):
    """Run the configured pipeline; returns the list of written paths."""
    if cfg.subcommand not in _PIPELINES:
        raise ConfigError(f"unknown subcommand {cfg.subcommand!r}",
                          field="subcommand")
    if dry_run:
        plan = {
            "subcommand": cfg.subcommand,
            "seed": cfg.seed,
            "out_dir": cfg.out_dir,
            "threads": cfg.threads,
            "tolerances": cfg.tolerances,
            "config": cfg.raw,
        }
        sys.stdout.write(json.dumps(plan, sort_keys=True, indent=2) + "\n")
        return []
    return _PIPELINES[cfg.subcommand](cfg)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="actiongate",
        description="Action-variable quantum computation toolkit")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--dry-run", action="store_true",
                        help="emit the resolved plan without computing")
    parser.add_argument("--tol", action="append", default=[],
                        metavar="NAME=VALUE", help="override a tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.subcommand, args.seed, args.out,
                          args.tol)
        paths = execute(cfg, dry_run=args.dry_run)
        for p in paths:
            sys.stderr.write(f"wrote {p}\n")
        return 0
    except ConfigError as exc:
        sys.stdout.write(json.dumps({
            "error": "ConfigError", "message": str(exc), "field": exc.field,
        }, sort_keys=True) + "\n")
        return 1
    except (ConvergenceError, QuadratureError) as exc:
        sys.stdout.write(json.dumps({
            "error": type(exc).__name__, "message": str(exc),
        }, sort_keys=True) + "\n")
        return 3
    except ActionGateError as exc:
        sys.stdout.write(json.dumps({
            "error": type(exc).__name__, "message": str(exc),
        }, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
