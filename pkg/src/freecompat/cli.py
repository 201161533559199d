"""Command-line front end.

Every subcommand prints a JSON document (``--format json``, the default)
or an aligned text table.  Usage errors exit with 2, domain and capacity
errors with 1 and a JSON error object on stderr.  ``FREECOMPAT_ORDER``
sets the default truncation order.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import compat, cumulant, distributions, freeness, jsonio, ncpart, series
from .coeffalg import (
    CapacityError,
    FreeGroupModel,
    Matrix,
    MatrixAlgebra,
    MatrixTensorModel,
    shift_example_elements,
)

DEFAULT_ORDER_ENV = "FREECOMPAT_ORDER"


class DomainError(Exception):
    pass


def _default_order(fallback: int) -> int:
    raw = os.environ.get(DEFAULT_ORDER_ENV)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{DEFAULT_ORDER_ENV} must be an integer, got {raw!r}")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Matrix):
        return "[" + "; ".join(" ".join(_fmt(v) for v in r) for r in x.rows) + "]"
    return str(x)


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _load_table(path: str, kind: str):
    return jsonio.series_from_dict(_read_json(path), kind)


# --- rendering ---------------------------------------------------------------------


def _render_rows(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _series_rows(f) -> list[list]:
    return [[" ".join(map(str, w)), c] for w, c in f.items() if not f.algebra.is_close(c, f.algebra.zero())]


class Output:
    def __init__(self, payload: dict, table: str):
        self.payload = payload
        self.table = table


def _series_output(f) -> Output:
    return Output(jsonio.series_to_dict(f), _render_rows(["word", "value"], _series_rows(f)))


# --- subcommands ---------------------------------------------------------------------


def cmd_nc(args) -> Output:
    if args.nc_cmd == "enumerate":
        if args.even:
            parts = ncpart.enumerate_nc_even(args.n)
        elif args.pair:
            parts = ncpart.enumerate_nc_pair(args.n)
        else:
            parts = ncpart.enumerate_nc(args.n)
        strs = [str(p) for p in parts]
        return Output({"n": args.n, "count": len(strs), "partitions": strs},
                      "".join(s + "\n" for s in strs) + f"# count {len(strs)}\n")
    if args.nc_cmd == "mobius":
        pairs = ncpart.mobius_to_top(args.n)
        rows = [[str(p), mu] for p, mu in pairs]
        payload = {"n": args.n, "mobius_to_top": [{"partition": str(p), "mu": mu} for p, mu in pairs],
                   "mu_min_max": ncpart.mobius(ncpart.zero(args.n), ncpart.one(args.n))}
        return Output(payload, _render_rows(["partition", "mu(pi,1)"], rows))
    if args.nc_cmd == "kreweras":
        pi = ncpart.NoncrossingPartition.parse(args.partition)
        k = ncpart.kreweras(pi)
        return Output({"partition": str(pi), "kreweras": str(k)}, f"{pi} -> {k}\n")
    raise DomainError("unknown nc command")


def cmd_cumulants(args) -> Output:
    m = _load_table(args.from_moments, "moment")
    return _series_output(cumulant.cumulants_from_moments(m))


def cmd_moments(args) -> Output:
    c = _load_table(args.from_cumulants, "cumulant")
    return _series_output(cumulant.moments_from_cumulants(c))


def cmd_rcalc(args) -> Output:
    lhs = _load_table(args.lhs, "cumulant")
    rhs = _load_table(args.rhs, "cumulant")
    if args.op == "add":
        out = freeness.r_add(lhs, rhs)
    elif args.op == "concat":
        out = freeness.r_concatenate(lhs, rhs)
    else:
        out = freeness.boxed_convolution(lhs, rhs, "trivial" if args.trivial_rhs else "scalar")
    return _series_output(out)


def cmd_solve_m(args) -> Output:
    r = jsonio.series_from_dict(_read_json(args.r))
    order = args.order or _default_order(8)
    return _series_output(series.solve_moment_from_r(r, order))


def _matrix_model(args):
    """Shift-example generators x, y in the tensor model."""
    if args.N < 2:
        raise DomainError("the matrix model needs --N >= 2")
    model, x, y = shift_example_elements(args.N, args.K)
    if args.weighted_phi:
        model = compat.corrupted_matrix_model(args.N, args.K, [x, y]).with_generators([x, y], ["x", "y"])
    return model


def cmd_check_compat(args) -> Output:
    rng = random.Random(args.seed)
    if args.model == "freegroup":
        model = FreeGroupModel()
        corpus = compat.freegroup_corpus(args.max_len)
    else:
        model = _matrix_model(args)
        corpus = compat.matrix_corpus(model, args.size, rng)
    if args.repair:
        model = compat.induced_compatible_functional(model)
    ok, dev = compat.is_compatible(model, corpus)
    payload = {"model": model.label, "corpus_size": len(corpus), "compatible": ok, "max_deviation": dev}
    return Output(payload, _render_rows(["key", "value"], [[k, payload[k]] for k in sorted(payload)]))


def cmd_property_star(args) -> Output:
    order = args.order or _default_order(3)
    model = FreeGroupModel() if args.model == "freegroup" else _matrix_model(args)
    ok, fails = cumulant.property_star_check(model, order)
    payload = {"model": model.label, "order": order, "holds": ok,
               "failures": [{"word": list(w), "gap": jsonio.encode_scalar(g)} for w, g in fails]}
    return Output(payload, _render_rows(["word", "phi(K)-k"], [[" ".join(map(str, w)), g] for w, g in fails])
                  + f"# holds {ok}\n")


def _parse_x0(text: str, model: MatrixTensorModel):
    kind, _, rest = text.partition(":")
    N, K = model.N, model.K
    if kind == "unit":
        return model.A.one()
    if kind == "shift":
        lower = Matrix([[Fraction(1) if i == j + 1 else Fraction(0) for j in range(N)] for i in range(N)])
        return model.embed(lower)
    if kind == "circulant":
        c = [jsonio.parse_rational(t) for t in rest.split(",") if t.strip()]
        if len(c) != K:
            raise DomainError(f"circulant needs {K} entries (one per K index)")
        m = Matrix([[c[(j - i) % K] for j in range(K)] for i in range(K)])
        return model.tensor(Matrix.identity(N), m)
    raise DomainError(f"unknown x0 {text!r}; use unit, shift or circulant:c0,...,c_(K-1)")


def cmd_subalgebra(args) -> Output:
    order = args.order or _default_order(4)
    if args.weighted_phi:
        model = compat.corrupted_matrix_model(args.N, args.K)
    else:
        model = MatrixTensorModel(args.N, args.K)
    x0 = _parse_x0(args.x0, model)
    rep = compat.verify_compatible_subalgebra_theorem(model, x0, order, rng=random.Random(args.seed))
    payload = {
        "b_central": rep.central,
        "scalar_valued": rep.scalar_valued,
        "power_compatible": rep.power_compatible,
        "alphas": [jsonio.encode_scalar(a) for a in rep.alphas] if rep.alphas else None,
        "conclusion_checked": rep.conclusion_checked,
        "conclusion_holds": rep.conclusion_holds,
        "words_checked": rep.words_checked,
        "max_deviation": rep.max_deviation,
    }
    return Output(payload, _render_rows(["key", "value"], [[k, payload[k]] for k in sorted(payload)]))


def cmd_semicircular(args) -> Output:
    t = jsonio.parse_rational(args.t)
    order = args.order or _default_order(8)
    if args.b_valued:
        alg = MatrixAlgebra(args.N)
        c = distributions.b_semicircular_table(t, order, alg)
    else:
        c = distributions.semicircular_cumulants(t, order)
    m = cumulant.moments_from_cumulants(c)
    moments = [m.coef((1,) * n) for n in range(1, order + 1)]
    cumulants = [c.coef((1,) * n) for n in range(1, order + 1)]
    enc = (lambda v: jsonio.encode_element(v, c.algebra))
    payload = {"t": jsonio.encode_scalar(t), "order": order, "flavor": c.flavor,
               "moments": [enc(v) for v in moments], "cumulants": [enc(v) for v in cumulants]}
    rows = [[n, moments[n - 1], cumulants[n - 1]] for n in range(1, order + 1)]
    return Output(payload, _render_rows(["n", "moment", "cumulant"], rows))


def cmd_examples(args) -> Output:
    model, x, y = shift_example_elements(args.N)
    Ex, Ey = model.E(x), model.E(y)
    prod = model.phi_B(Ex * Ey)
    sep = model.phi_B(Ex) * model.phi_B(Ey)
    K = cumulant.b_valued_cumulants(model, 2)
    k = cumulant.scalar_cumulants(model, 2)
    gap = model.phi_B(K.coef((1, 2))) - k.coef((1, 2))
    payload = {"N": args.N, "phi_E_x_E_y": jsonio.encode_scalar(prod), "phi_E_x_phi_E_y": jsonio.encode_scalar(sep),
               "phi_K2t_minus_k2": jsonio.encode_scalar(gap)}
    rows = [["phi(E(x)E(y))", prod], ["phi(E(x))phi(E(y))", sep], ["phi(K2t(x,y)) - k2(x,y)", gap]]
    return Output(payload, _render_rows(["quantity", "value"], rows))


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freecompat", description="free cumulant and compatibility calculator")
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized corpora")
    sub = p.add_subparsers(dest="cmd", required=True)

    nc = sub.add_parser("nc", help="noncrossing partitions")
    ncs = nc.add_subparsers(dest="nc_cmd", required=True)
    e = ncs.add_parser("enumerate")
    e.add_argument("--n", type=int, required=True)
    g = e.add_mutually_exclusive_group()
    g.add_argument("--even", action="store_true")
    g.add_argument("--pair", action="store_true")
    m = ncs.add_parser("mobius")
    m.add_argument("--n", type=int, required=True)
    k = ncs.add_parser("kreweras")
    k.add_argument("--partition", required=True)

    c = sub.add_parser("cumulants")
    c.add_argument("--from-moments", required=True, metavar="FILE")
    mo = sub.add_parser("moments")
    mo.add_argument("--from-cumulants", required=True, metavar="FILE")

    r = sub.add_parser("rcalc")
    r.add_argument("op", choices=["add", "concat", "boxed"])
    r.add_argument("--lhs", required=True)
    r.add_argument("--rhs", required=True)
    r.add_argument("--trivial-rhs", action="store_true", help="B-valued boxed convolution with a trivial right table")

    s = sub.add_parser("solve-m")
    s.add_argument("--r", required=True, metavar="FILE")
    s.add_argument("--order", type=int)

    def model_opts(q, models=("matrix", "freegroup")):
        q.add_argument("--model", choices=models, required=True)
        q.add_argument("--N", type=int, default=3)
        q.add_argument("--K", type=int, default=2)
        q.add_argument("--weighted-phi", action="store_true", help="matrix model with a non-uniform weighted trace")

    cc = sub.add_parser("check-compat")
    model_opts(cc)
    cc.add_argument("--max-len", type=int, default=6)
    cc.add_argument("--size", type=int, default=200)
    cc.add_argument("--repair", action="store_true", help="replace phi by phi o E first")
    cc.add_argument("--report", choices=["json"], default="json")

    ps = sub.add_parser("property-star")
    model_opts(ps)
    ps.add_argument("--order", type=int)

    st = sub.add_parser("subalgebra-theorem")
    model_opts(st, ("matrix",))
    st.add_argument("--x0", required=True, help="unit | shift | circulant:c0,...,c_(K-1)")
    st.add_argument("--order", type=int)

    sc = sub.add_parser("semicircular")
    sc.add_argument("--t", required=True)
    sc.add_argument("--order", type=int)
    sc.add_argument("--b-valued", action="store_true")
    sc.add_argument("--N", type=int, default=2, help="matrix size of B in --b-valued mode")

    ex = sub.add_parser("examples")
    exs = ex.add_subparsers(dest="ex_cmd", required=True)
    sh = exs.add_parser("shift")
    sh.add_argument("--N", type=int, default=3)
    return p


HANDLERS = {
    "nc": cmd_nc,
    "cumulants": cmd_cumulants,
    "moments": cmd_moments,
    "rcalc": cmd_rcalc,
    "solve-m": cmd_solve_m,
    "check-compat": cmd_check_compat,
    "property-star": cmd_property_star,
    "subalgebra-theorem": cmd_subalgebra,
    "semicircular": cmd_semicircular,
    "examples": cmd_examples,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = HANDLERS[args.cmd](args)
    except (DomainError, CapacityError, ValueError, IndexError, KeyError, OSError, json.JSONDecodeError) as exc:
        stderr.write(jsonio.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    stdout.write(jsonio.dumps(out.payload) if args.format == "json" else out.table)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
