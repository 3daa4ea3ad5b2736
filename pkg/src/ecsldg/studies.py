"""Study drivers: single runs, the reversibility (spatial-order) table,
the temporal-order table, and the conservation CFL sweep.

Every driver starts each member simulation from a fresh projection and
writes full-precision CSV; member runs of a study are independent and may
execute on a thread pool.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, with_overrides
from .dg import DGFunction1D
from .diagnostics import DiagRecord, convergence_order, error_norms, field_error, observe
from .field import gauss_residual, moment_arrays
from .scenarios import by_name
from .splitting import parse_scheme
from .stepper import SimState, TimeControl, run

_FMT = "{:.17g}".format


def _write_csv(path: str, header: str, rows) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _map_maybe_parallel(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _snapshot_lines(label, t, mesh_x, mesh_v, k, values):
    yield f"# {label} snapshot"
    yield f"# t = {_FMT(t)}"
    yield f"# N_x = {mesh_x.n_cells}"
    yield f"# N_v = {mesh_v.n_cells}"
    yield f"# k = {k}"
    yield f"# x = [{_FMT(mesh_x.lo)}, {_FMT(mesh_x.hi)}]"
    yield f"# v = [{_FMT(mesh_v.lo)}, {_FMT(mesh_v.hi)}]"
    for v in values.ravel():
        yield _FMT(v)


def write_snapshot(out_dir: str, state: SimState) -> None:
    """Nodal f in ascending (i, p, j, q) order and E in (i, p) order."""
    f = state.f
    tag = f"t{state.t:.6f}"
    for label, values in (("f", f.values), ("E", state.e_nodal)):
        path = os.path.join(out_dir, f"{label}_{tag}.dat")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in _snapshot_lines(label, state.t, f.mesh_x, f.mesh_v, f.k, values):
                fh.write(line + "\n")


@dataclass
class RunResult:
    state: SimState
    records: list = field(default_factory=list)  # DiagRecord, t=0 first

    @property
    def initial(self) -> DiagRecord:
        return self.records[0]

    def max_drift(self, attr: str, relative: bool = True) -> float:
        ref = getattr(self.initial, attr)
        drifts = [abs(getattr(r, attr) - ref) for r in self.records[1:]]
        top = max(drifts, default=0.0)
        return top / abs(ref) if relative and ref != 0.0 else top


def simulate(cfg: RunConfig, out_dir: str | None = None,
             series_name: str | None = None) -> RunResult:
    """Run one configuration; optionally write its series CSV and snapshots.

    The CSV has one row per completed step; the t=0 record is kept in the
    returned result as the drift reference.
    """
    scenario = by_name(cfg.scenario)
    state = scenario.build(cfg.n_x, cfg.n_v, cfg.k, lam=cfg.lam)
    records = [observe(state)]
    unscaled = []
    track_unscaled = cfg.lam != 1.0

    def on_step(s: SimState) -> None:
        records.append(observe(s))
        if track_unscaled:
            n_dg = DGFunction1D.from_nodal(s.f.mesh_x, s.f.k, moment_arrays(s.f)[0])
            unscaled.append((s.t, gauss_residual(s.e_dg(), n_dg, 1.0)))

    on_stop = None
    if out_dir is not None and cfg.snapshot_times:
        on_stop = lambda s: write_snapshot(out_dir, s)

    run(state, cfg.t_final, cfg.time_control(), cfg.splitting(), cfg.mode,
        on_step=on_step, stop_times=cfg.snapshot_times, on_stop=on_stop)

    if out_dir is not None:
        name = series_name or cfg.series_name
        _write_csv(os.path.join(out_dir, name), ",".join(DiagRecord.CSV_FIELDS),
                   (r.csv_row() for r in records[1:]))
        if track_unscaled:
            # the lam^2-free residual normalization, for small-Debye runs
            _write_csv(os.path.join(out_dir, "gauss_res_unscaled_" + name),
                       "t,gauss_res_unscaled",
                       (f"{_FMT(t)},{_FMT(r)}" for t, r in unscaled))
    return RunResult(state=state, records=records)


def run_single(cfg: RunConfig, out_dir: str) -> RunResult:
    return simulate(cfg, out_dir=out_dir)


def reversibility_error(cfg: RunConfig, n: int, k: int) -> tuple[float, float, float]:
    """Forward to T, reflect v, forward to 2T, reflect; errors vs the
    projected initial data (L1 and L2 of f, L2 of E)."""
    scenario = by_name(cfg.scenario)
    state = scenario.build(n, n, k, lam=cfg.lam)
    f_ref = state.f.copy()
    e_ref = state.e_nodal.copy()
    control = cfg.time_control()
    scheme = cfg.splitting()
    run(state, cfg.t_final, control, scheme, cfg.mode)
    state = state.reflect_v()
    run(state, 2.0 * cfg.t_final, control, scheme, cfg.mode)
    state = state.reflect_v()
    l1, l2 = error_norms(state.f, f_ref)
    e2 = field_error(state.e_nodal, e_ref, state.f.mesh_x.dx, k)
    return l1, l2, e2


def run_reversibility_study(cfg: RunConfig, out_dir: str | None = None,
                            threads: int = 1) -> dict:
    """Spatial-convergence table over cfg.meshes x cfg.degrees."""
    tasks = [(k, n) for k in cfg.degrees for n in cfg.meshes]
    errs = _map_maybe_parallel(lambda kn: reversibility_error(cfg, kn[1], kn[0]),
                               tasks, threads)
    table = {}
    rows = []
    for k in cfg.degrees:
        block = [errs[tasks.index((k, n))] for n in cfg.meshes]
        h = [1.0 / n for n in cfg.meshes]
        orders = [convergence_order(h, [b[i] for b in block]) for i in range(3)]
        table[k] = {"meshes": list(cfg.meshes),
                    "l1": [b[0] for b in block], "l1_order": orders[0],
                    "l2": [b[1] for b in block], "l2_order": orders[1],
                    "e2": [b[2] for b in block], "e2_order": orders[2]}
        for i, n in enumerate(cfg.meshes):
            def cell(seq):
                return _FMT(seq[i - 1]) if i > 0 else ""
            rows.append(",".join([
                str(k), str(n),
                _FMT(block[i][0]), cell(orders[0]),
                _FMT(block[i][1]), cell(orders[1]),
                _FMT(block[i][2]), cell(orders[2]),
            ]))
    if out_dir is not None:
        _write_csv(os.path.join(out_dir, "spatial_convergence.csv"),
                   "k,mesh,f_l1,f_l1_order,f_l2,f_l2_order,e_l2,e_l2_order", rows)
    return table


def run_temporal_study(cfg: RunConfig, out_dir: str | None = None,
                       threads: int = 1) -> dict:
    """Errors at t_final versus a small-step reference, per scheme and CFL,
    with the fitted log-log slope.

    Each scheme is compared against its own ref_cfl run: composed schemes
    accumulate slightly different semi-Lagrangian projection diffusion per
    unit time, so a cross-scheme reference would floor the errors at that
    offset instead of the splitting error.
    """
    scenario = by_name(cfg.scenario)

    def reference(scheme_name):
        state = scenario.build(cfg.n_x, cfg.n_v, cfg.k, lam=cfg.lam)
        run(state, cfg.t_final, TimeControl(cfl=cfg.ref_cfl),
            parse_scheme(scheme_name), cfg.mode)
        return state

    refs = dict(zip(cfg.schemes,
                    _map_maybe_parallel(reference, list(cfg.schemes), threads)))

    def one(task):
        scheme_name, cfl = task
        state = scenario.build(cfg.n_x, cfg.n_v, cfg.k, lam=cfg.lam)
        steps = [0]

        def count(_):
            steps[0] += 1

        run(state, cfg.t_final, TimeControl(cfl=cfl),
            parse_scheme(scheme_name), cfg.mode, on_step=count)
        ref_state = refs[scheme_name]
        l1, l2 = error_norms(state.f, ref_state.f)
        e2 = field_error(state.e_nodal, ref_state.e_nodal, state.f.mesh_x.dx, cfg.k)
        return {"scheme": scheme_name, "cfl": cfl, "mean_dt": cfg.t_final / steps[0],
                "f_l1": l1, "f_l2": l2, "e_l2": e2}

    tasks = [(s, c) for s in cfg.schemes for c in cfg.cfls]
    results = _map_maybe_parallel(one, tasks, threads)

    table = {}
    rows = []
    for scheme_name in cfg.schemes:
        entries = [r for r in results if r["scheme"] == scheme_name]
        dts = np.array([r["mean_dt"] for r in entries])
        errors = np.array([r["f_l2"] for r in entries])
        slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
        table[scheme_name] = {"entries": entries, "slope": slope}
        for r in entries:
            rows.append(",".join([scheme_name] + [
                _FMT(r[c]) for c in ("cfl", "mean_dt", "f_l1", "f_l2", "e_l2")
            ]))
        rows.append(f"# {scheme_name} slope = {_FMT(slope)}")
    if out_dir is not None:
        _write_csv(os.path.join(out_dir, "temporal_convergence.csv"),
                   "scheme,cfl,mean_dt,f_l1,f_l2,e_l2", rows)
    return table


def run_cfl_sweep(cfg: RunConfig, out_dir: str | None = None,
                  threads: int = 1) -> dict:
    """Max conservation drifts over a range of CFL numbers."""
    def one(cfl):
        run_cfg = with_overrides(cfg, cfl=cfl, dt=None, study="single")
        name = f"series_cfl{cfl:g}.csv"
        res = simulate(run_cfg, out_dir=out_dir, series_name=name)
        return {
            "cfl": cfl,
            "e_total_drift": res.max_drift("e_total"),
            "mass_drift": res.max_drift("mass"),
            "momentum_drift": res.max_drift("momentum", relative=False),
        }

    results = _map_maybe_parallel(one, list(cfg.sweep_cfls), threads)
    if out_dir is not None:
        _write_csv(
            os.path.join(out_dir, "cfl_sweep.csv"),
            "cfl,max_rel_dE_total,max_rel_dL1,max_abs_dP",
            (",".join([_FMT(r["cfl"]), _FMT(r["e_total_drift"]),
                       _FMT(r["mass_drift"]), _FMT(r["momentum_drift"])])
             for r in results),
        )
    return {r["cfl"]: r for r in results}
