"""Command-line front end.

Subcommands: analyze, count, components, project, fit, factorize, verify,
demo-shift.  Outputs are JSON (sorted keys, fixed layout), so runs with the
same inputs and seed are byte-identical.  Usage errors exit 2; numerical or
constraint errors exit 1 with a structured JSON error on stderr.

Set PERMLIN_THREADS to pin the BLAS thread count before numpy loads.
"""

import os

if os.environ.get("PERMLIN_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ["PERMLIN_THREADS"])

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import datasets, equivariant, invariant, matio, optimize, oracles, spectral
from .errors import CyclicOnlyError, PermlinError
from .perms import Permutation, cycle_decomposition, parse_permutation

JSON_KW = dict(indent=2, sort_keys=True)


def _emit(obj, out_path=None):
    text = json.dumps(obj, **JSON_KW) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _add_perm_args(sp, allow_many=False):
    sp.add_argument("--perm", action="append", default=None,
                    help="permutation: cycle notation or one-line image"
                         + ("; repeat for several generators" if allow_many else ""))
    sp.add_argument("--n", type=int, default=None, help="ground-set size")
    sp.add_argument("--cycle-type", default=None,
                    help='cycle-type shorthand "AxB[,CxD...]": A cycles of length B')


def _cycle_lengths_from_type(text):
    lengths = []
    for part in text.split(","):
        a, _, b = part.strip().partition("x")
        try:
            count, length = int(a), int(b)
        except ValueError:
            raise PermlinError(f'bad cycle-type token {part.strip()!r}; expected "AxB"') from None
        if count < 1 or length < 1:
            raise PermlinError(f"cycle-type counts and lengths must be positive: {part.strip()!r}")
        lengths.extend([length] * count)
    return lengths


def _shift_perm_for_lengths(lengths):
    """A concrete permutation with the given cycle type (consecutive cycles)."""
    image = []
    start = 1
    for l in lengths:
        block = list(range(start, start + l))
        image.extend(block[1:] + block[:1])
        start += l
    return Permutation(sum(lengths), tuple(image))


def _resolve_gens(args, allow_many=False):
    if args.cycle_type:
        if args.perm:
            raise PermlinError("pass either --perm or --cycle-type, not both")
        return [_shift_perm_for_lengths(_cycle_lengths_from_type(args.cycle_type))]
    if args.perm is None or args.n is None:
        raise PermlinError("need --perm with --n, or --cycle-type")
    gens = [parse_permutation(t, args.n) for t in args.perm]
    if len(gens) > 1 and not allow_many:
        raise CyclicOnlyError("this command handles a single (cyclic) generator only")
    return gens


def _spectrum_of(gen):
    return spectral.eigen_multiplicities(cycle_decomposition(gen))


def _block_layout_json(spec):
    real, offs = [], spec.real_offsets()
    for b, off in zip(spec.real_blocks, offs):
        real.append({"kind": b.kind, "l": b.l, "m": b.m, "size": b.size,
                     "rows": b.rows, "offset": off})
    cplx = [{"l": b.l, "m": b.m, "size": b.size, "offset": off}
            for b, off in zip(spec.complex_blocks, spec.complex_offsets())]
    return {"complex_blocks": cplx, "real_blocks": real}


def cmd_analyze(args):
    gens = _resolve_gens(args, allow_many=True)
    report = {"n": gens[0].n, "generators": len(gens)}
    if len(gens) == 1:
        cd = cycle_decomposition(gens[0])
        spec = spectral.eigen_multiplicities(cd)
        report.update({
            "cycle_type": sorted(cd.lengths, reverse=True),
            "cycles": [list(c) for c in cd.cycles],
            "d_table": {str(l): d for l, d in sorted(spec.multiplicities.items())},
            "commutant_dimension": spectral.commutant_dimension(cd),
        })
        report.update(_block_layout_json(spec))
    else:
        _, dim = equivariant.pair_orbit_labels(gens)
        report["commutant_dimension"] = int(dim)
        report["note"] = "block layout is available for a single cyclic generator only"
    _emit(report, args.out)
    return 0


def cmd_count(args):
    spec = _spectrum_of(_resolve_gens(args)[0])
    count = equivariant.count_components(spec, args.rank, args.field)
    if args.out:
        _emit({"count": str(count), "field": args.field, "n": spec.n, "rank": args.rank}, args.out)
    print(count)
    return 0


def cmd_components(args):
    spec = _spectrum_of(_resolve_gens(args)[0])
    count = equivariant.count_components(spec, args.rank, args.field)
    if args.count_only:
        print(count)
        return 0
    descs = []
    for d in equivariant.enumerate_components(spec, args.rank, args.field, limit=args.limit):
        entry = {
            "rank_vector": list(d.rank_vector.values),
            "blocks": [{"l": l, "m": m, "rank": r} for (l, m, r) in d.rank_vector.entries],
            "dimension": d.dimension,
            "block_shapes": [{"kind": k, "size": s, "rank": r} for (k, s, r) in d.block_shapes],
        }
        if d.degree is not None:
            entry["degree"] = str(d.degree)
        if args.field == "real" and any(k == "realization" and r > 0 for (k, _, r) in d.block_shapes):
            entry["degree_note"] = "no proven real degree formula; conjectured square of the complex block degrees"
        descs.append(entry)
    _emit({"count": str(count), "field": args.field, "n": spec.n, "rank": args.rank,
           "components": descs}, args.out)
    return 0


def cmd_project(args):
    gens = _resolve_gens(args, allow_many=True)
    m = np.asarray(matio.read_matrix(args.matrix), dtype=float)
    if args.mode == "invariant":
        space = invariant.invariant_space(gens, m.shape[0], gens[0].n, min(m.shape))
        proj = invariant.invariant_project(m, space.partition)
    else:
        proj = equivariant.equivariant_project(m, gens)
    distance = float(np.linalg.norm(proj - m))
    payload = {"mode": args.mode, "distance": distance,
               "matrix": matio.matrix_to_json_obj(proj)}
    _emit(payload, args.out)
    return 0


def _fit_result_json(fit, extras=None):
    obj = {
        "loss": fit.loss,
        "component": (list(fit.component.values) if not isinstance(fit.component, str)
                      else fit.component),
        "minimizer": matio.matrix_to_json_obj(fit.minimizer),
        "per_block": [
            {"block": {"kind": b.block[0], "l": b.block[1], "m": b.block[2]},
             "rank": b.rank,
             "kept_singular_values": list(b.kept),
             "dropped_singular_values": list(b.dropped),
             "boundary_tie": b.boundary_tie,
             "loss": b.loss}
            for b in fit.per_block
        ],
        "ridge": fit.regularization,
    }
    if fit.component_source:
        obj["component_source"] = fit.component_source
    if fit.candidates is not None:
        obj["candidates"] = [{"rank_vector": list(v), "loss": l} for v, l in fit.candidates]
    if extras:
        obj.update(extras)
    return obj


def cmd_fit(args):
    gens = _resolve_gens(args, allow_many=(args.mode == "invariant"))
    x = np.asarray(matio.read_matrix(args.x), dtype=float)
    y = np.asarray(matio.read_matrix(args.y), dtype=float)
    if args.mode == "invariant":
        space = invariant.invariant_space(gens, y.shape[0], x.shape[0], args.rank)
        fit = invariant.fit_invariant(x, y, space, ridge=args.ridge)
        extras = {"compact_factor": matio.matrix_to_json_obj(
            invariant.psi_compress(fit.minimizer, space.partition))}
    else:
        component = None
        if args.component:
            values = [int(t) for t in args.component.split(",")]
            component = equivariant.make_rank_vector(_spectrum_of(gens[0]), "real", values)
        fit = optimize.fit_equivariant(
            x, y, gens[0], args.rank, component=component,
            search_limit=args.search_limit, heuristic=args.heuristic, ridge=args.ridge)
        extras = None
    _emit(_fit_result_json(fit, extras), args.out)
    return 0


def _weight_report_json(report):
    return {
        "decoder_groups": [[[r, c, s] for (r, c, s) in g] for g in report.decoder_groups],
        "encoder_groups": [[[r, c, s] for (r, c, s) in g] for g in report.encoder_groups],
        "inactive_inputs": list(report.inactive_inputs),
        "inactive_outputs": list(report.inactive_outputs),
    }


def cmd_factorize(args):
    gens = _resolve_gens(args, allow_many=(args.mode == "invariant"))
    if args.mode == "invariant":
        m = np.asarray(matio.read_matrix(args.matrix), dtype=float)
        space = invariant.invariant_space(
            gens, m.shape[0], gens[0].n, args.rank if args.rank is not None else min(m.shape))
        dec, enc = invariant.invariant_autoencoder(space, m)
        k = space.partition.k
        groups = []
        for i in range(enc.shape[0]):
            for block in space.partition.blocks:
                groups.append([[i, j - 1, 1] for j in block])
        payload = {
            "mode": "invariant",
            "decoder": matio.matrix_to_json_obj(dec),
            "encoder": matio.matrix_to_json_obj(enc),
            "weight_sharing": {"encoder_groups": groups, "distinct_encoder_columns": k},
            "free_parameters": dec.shape[0] * dec.shape[1] + enc.shape[0] * k,
        }
    else:
        spec = _spectrum_of(gens[0])
        values = [int(t) for t in args.component.split(",")]
        rvec = equivariant.make_rank_vector(spec, "real", values)
        if args.matrix:
            m = np.asarray(matio.read_matrix(args.matrix), dtype=float)
            got = equivariant.classify_component(m, gens[0])
            if got.values != rvec.values:
                raise PermlinError(f"matrix lies in component {list(got.values)}, not {list(rvec.values)}")
        par = equivariant.parameterize_component(
            rvec, gens[0], rng=np.random.default_rng(args.seed))
        payload = {
            "mode": "equivariant",
            "rank_vector": list(rvec.values),
            "decoder": matio.matrix_to_json_obj(par.decoder),
            "encoder": matio.matrix_to_json_obj(par.encoder),
            "tilde_decoder": matio.matrix_to_json_obj(par.tilde_decoder),
            "tilde_encoder": matio.matrix_to_json_obj(par.tilde_encoder),
            "weight_sharing": _weight_report_json(par.pattern),
            "free_parameters": equivariant.free_parameter_count(spec, rvec),
        }
    _emit(payload, args.out)
    return 0


def cmd_verify(args):
    gens = _resolve_gens(args, allow_many=True)
    rng = np.random.default_rng(args.seed)
    checks = []
    n = gens[0].n
    if n <= oracles.MAX_NULLSPACE_N:
        fast = equivariant.pair_orbit_labels(gens)[1]
        slow = oracles.nullspace_commutant_dim(gens)
        checks.append({"check": "commutant_dimension", "fast": int(fast), "oracle": int(slow),
                       "ok": bool(fast == slow)})
    if len(gens) == 1:
        spec = _spectrum_of(gens[0])
        for field in ("complex", "real"):
            blocks = spec.complex_blocks if field == "complex" else spec.real_blocks
            if len(blocks) <= oracles.MAX_COUNT_BLOCKS and all(
                    b.size <= oracles.MAX_COUNT_BOUND for b in blocks):
                fast = equivariant.count_components(spec, args.rank, field)
                slow = oracles.recursive_component_count(spec, args.rank, field)
                checks.append({"check": f"component_count_{field}", "fast": str(fast),
                               "oracle": str(slow), "ok": bool(fast == slow)})
    if n <= oracles.MAX_ALS_DIM:
        x = rng.standard_normal((n, n + 2))
        y = rng.standard_normal((n, n + 2))
        r = max(1, min(args.rank, n - 1))
        fast = optimize.fit_rank_bounded(x, y, r).loss
        slow = oracles.als_low_rank(r, restarts=40, x=x, y=y, seed=args.seed)
        checks.append({"check": "rank_bounded_fit_vs_als", "fast": fast, "oracle": slow,
                       "ok": bool(fast <= slow + 1e-6)})
    ok = all(c["ok"] for c in checks)
    _emit({"ok": ok, "checks": checks}, args.out)
    return 0 if ok else 1


def cmd_demo_shift(args):
    rng_seed = args.seed
    X = datasets.demo_shift_dataset(args.height, args.width, args.samples,
                                    seed=rng_seed, noise=args.noise)
    sigma = datasets.horizontal_shift_permutation(args.height, args.width)
    spec = _spectrum_of(sigma)
    r = args.rank
    bc = spectral.real_base_change(sigma)

    dense = optimize.fit_rank_bounded(X, X, r)
    best = optimize.fit_equivariant(X, X, sigma, r, heuristic="energy", base_change=bc)

    blocks = [(b.kind, b.size, b.rank_multiplier) for b in spec.real_blocks]
    unit = sum(1 for _, _, mult in blocks if mult == 1)
    pair = len(blocks) - unit
    c = max(1, r // (unit + 2 * pair))
    equal_vals = [min(c, b.size) for b in spec.real_blocks]
    equal_rvec = equivariant.make_rank_vector(spec, "real", equal_vals)
    equal = optimize.fit_equivariant(
        X, X, sigma, equal_rvec.total_rank, component=equal_rvec, base_change=bc)

    # high-pass: zero rank on the low-frequency half of the blocks (by angle),
    # full rank on the rest
    angles = []
    for b in spec.real_blocks:
        ang = 0.0 if b.kind == "real_plus" else (
            np.pi if b.kind == "real_minus" else 2 * np.pi * (b.l - b.m) / b.l)
        angles.append(ang)
    order = np.argsort(angles)
    cut = len(order) // 2
    high_vals = [0] * len(blocks)
    for i in order[cut:]:
        high_vals[i] = spec.real_blocks[i].size
    high_rvec = equivariant.make_rank_vector(spec, "real", high_vals)
    high = optimize.fit_equivariant(
        X, X, sigma, high_rvec.total_rank, component=high_rvec, base_change=bc)

    payload = {
        "config": {"height": args.height, "width": args.width, "samples": args.samples,
                   "rank": r, "seed": rng_seed, "noise": args.noise},
        "losses_per_pixel": {
            "dense": dense.loss / (X.size),
            "equivariant_energy": best.loss / (X.size),
            "equivariant_equal_rank": equal.loss / (X.size),
            "equivariant_high_pass": high.loss / (X.size),
        },
        "total_ranks": {
            "dense": r,
            "equivariant_energy": best.component.total_rank,
            "equivariant_equal_rank": equal_rvec.total_rank,
            "equivariant_high_pass": high_rvec.total_rank,
        },
        "free_parameters": {
            "dense": 2 * r * sigma.n,
            "equivariant_energy": equivariant.free_parameter_count(spec, best.component),
        },
        "components": {
            "equivariant_energy": list(best.component.values),
            "equivariant_equal_rank": list(equal_rvec.values),
            "equivariant_high_pass": list(high_rvec.values),
        },
        "ordering_ok": bool(
            dense.loss <= best.loss + 1e-9
            and best.loss <= equal.loss + 1e-9
            and equal.loss <= high.loss + 1e-9
        ),
    }
    _emit(payload, args.out)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="permlin", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="cycle type, eigenvalue multiplicities, commutant dimension, block layout")
    _add_perm_args(sp, allow_many=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("count", help="count irreducible components")
    _add_perm_args(sp)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--field", choices=["real", "complex"], default="real")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("components", help="enumerate components with dimensions and degrees")
    _add_perm_args(sp)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--field", choices=["real", "complex"], default="real")
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--limit", type=int, default=10**6)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_components)

    sp = sub.add_parser("project", help="nearest point on the invariant/equivariant linear space")
    _add_perm_args(sp, allow_many=True)
    sp.add_argument("--mode", choices=["invariant", "equivariant"], required=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("fit", help="closed-form squared-error fit")
    _add_perm_args(sp, allow_many=True)
    sp.add_argument("--mode", choices=["invariant", "equivariant"], required=True)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--component", help='comma-separated block ranks in canonical order (equivariant)')
    sp.add_argument("--search-limit", type=int, default=10**6)
    sp.add_argument("--heuristic", choices=["energy"])
    sp.add_argument("--ridge", type=float)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("factorize", help="autoencoder factors with the weight-sharing report")
    _add_perm_args(sp, allow_many=True)
    sp.add_argument("--mode", choices=["invariant", "equivariant"], required=True)
    sp.add_argument("--matrix")
    sp.add_argument("--rank", type=int)
    sp.add_argument("--component", help="comma-separated block ranks (equivariant)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_factorize)

    sp = sub.add_parser("verify", help="cross-check fast paths against brute-force oracles")
    _add_perm_args(sp, allow_many=True)
    sp.add_argument("--rank", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("demo-shift", help="synthetic shift-equivariant dataset + end-to-end fits")
    sp.add_argument("--height", type=int, default=32)
    sp.add_argument("--width", type=int, default=32)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--rank", type=int, default=99)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--noise", type=float, default=0.05)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_demo_shift)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except PermlinError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}, **JSON_KW) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
