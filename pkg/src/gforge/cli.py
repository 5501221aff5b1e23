"""``gforge`` command line: run a pipeline on a problem file and print a report.

Exit codes: 0 success, 2 verification failure, 3 undetermined at the bounds,
4 parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .exactla import ScalarMatrix
from .freealg import ORDER_TAG, ParseError
from .gbasis import DegreeBoundError
from .homalg import (DegeneratePairing, NotRegular, TowerError, as_regular_report, det_sigma,
                     ext_algebra, frobenius_data, hdet, tau_E_restrictions, build_phi_tower)
from .nakayama import TailError, nakayama_of_base, nakayama_of_twisted, nakayama_oracle
from .problem import Problem, ProblemError, load_problem
from .resolution import BoundTooSmall, LiftError, exactness_report, is_pure, minimal_resolution, verify_resolution
from .twist import NotTwisting, Violation, build_twisted_tensor, check_twist, invert_sigma, validate_sigma

COMMANDS = ("hilbert", "check-twist", "resolve", "ext", "hdet", "det", "nakayama", "all")

EXIT_OK, EXIT_FAIL, EXIT_UNDETERMINED, EXIT_PARSE = 0, 2, 3, 4


class Failure(Exception):
    """A verification failed."""


class Undetermined(Exception):
    """A hypothesis cannot be settled within the bounds."""


def _fmt(F, x) -> str:
    return F.format(x)


def _matrix(M: ScalarMatrix) -> list:
    return M.format_rows()


def _cls(c) -> str:
    return f"e{c[0]}_{c[1]}"


def _dims(d: dict) -> dict:
    return {f"{i},{t}": n for (i, t), n in d.items()}


class Session:
    """Lazily computed invariants of one problem."""

    def __init__(self, prob: Problem, oracle: bool = False):
        self.prob = prob
        self.oracle = oracle
        self._cache: dict = {}
        self.hyp: dict = {}
        self.caveats: list = []

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # algebras ------------------------------------------------------
    def twisted(self):
        return self._get("T", lambda: build_twisted_tensor(self.prob.data))

    def twisted_bar(self):
        d = self.prob.data
        if not d.has_delta():
            return self.twisted()
        return self._get("Tbar", lambda: build_twisted_tensor(d.without_delta()))

    def algebra(self, name):
        if name == "A":
            return self.prob.A
        if name == "B":
            return self.prob.B
        return self.twisted().C

    def res(self, name):
        def make():
            given = self.prob.resolution(name)
            if given is not None:
                return given
            return minimal_resolution(self.algebra(name), self.prob.H, self.prob.D)
        return self._get(("res", name), make)

    def as_report(self, name):
        return self._get(("as", name), lambda: as_regular_report(self.algebra(name), self.res(name)))

    def ext(self, name):
        return self._get(("ext", name), lambda: ext_algebra(self.algebra(name), self.res(name)))

    def frob(self, name):
        return self._get(("frob", name), lambda: frobenius_data(self.ext(name)))

    def mu(self, name):
        return self._get(("mu", name), lambda: nakayama_of_base(self.algebra(name), self.frob(name)))

    # twist invariants ----------------------------------------------
    def tower(self):
        return self._get("tower", lambda: build_phi_tower(self.prob.data, self.res("B"), self.twisted_bar()))

    def det(self):
        return self._get("det", lambda: det_sigma(self.tower()))

    def hdet(self):
        return self._get("hdet", lambda: hdet(self.prob.A, self.prob.data.sigma, self.res("A")))

    # hypotheses ----------------------------------------------------
    def require_regular(self, name):
        rep = self.as_report(name)
        key = f"{name} AS-regular"
        if rep["status"] == "AS-regular":
            self.hyp[key] = f"verified within bounds (D={self.prob.D}, H={self.prob.H})"
            return rep
        if rep["status"] == "undetermined at bound":
            self.hyp[key] = "undetermined at bound"
            raise Undetermined(f"{name}: {rep['reason']}")
        self.hyp[key] = "failed"
        raise Failure(f"{name} is not AS-regular: {rep['reason']}")

    def require_degree_one(self, name):
        A = self.algebra(name)
        ok = all(d == 1 for d in A.alphabet.degrees)
        self.hyp[f"{name} generated in degree 1"] = "verified" if ok else "failed"
        if not ok:
            raise Failure(f"{name} is not generated in degree 1")

    def require_pure_B(self):
        pure, where = is_pure(self.res("B"))
        self.hyp["B pure"] = "verified" if pure else f"failed at position {where}"
        if not pure:
            raise Failure(f"resolution of B is not pure at position {where}")

    def require_invertible(self):
        phi = self._get("phi", lambda: invert_sigma(self.prob.data.sigma))
        self.hyp["sigma invertible"] = "verified" if phi is not None else "failed"
        if phi is None:
            raise Failure("sigma is not invertible")
        return phi

    def record_assertions(self):
        a = self.prob.assertions
        target = "A (x)^tau-bar B" if self.prob.data.has_delta() else "C"
        if "noetherian" in a:
            self.hyp[f"{target} noetherian"] = "asserted"
        if "koszul" in a:
            self.hyp["A, B Koszul"] = "asserted"
        if not a:
            self.hyp["noetherian or Koszul"] = "not asserted"
            self.caveats.append("neither --assert-noetherian nor --assert-koszul given; "
                                "theorem output is conditional")


# ------------------------------------------------------------ commands

def cmd_hilbert(s: Session) -> dict:
    p = s.prob
    out = {"A": p.A.hilbert(), "B": p.B.hilbert()}
    try:
        T = s.twisted()
        out["C"] = T.hilbert
        out["convolution"] = T.expected
        out["factorizes"] = True
    except NotTwisting as e:
        out["factorizes"] = False
        out["defect"] = {"degree": e.degree, "expected": e.expected, "actual": e.actual}
        raise Failure(str(e)) from None
    return out


def cmd_check_twist(s: Session) -> dict:
    data = s.prob.data
    out = {}
    try:
        out["sigma"] = validate_sigma(data.sigma)
        out["delta"] = data.delta.validate()
    except Violation as e:
        raise Failure(str(e)) from None
    phi = invert_sigma(data.sigma)
    out["sigma_invertible"] = phi is not None
    if phi is not None:
        out["sigma_inverse"] = phi.format()
    try:
        cert = check_twist(data)
    except NotTwisting as e:
        out["certified"] = False
        raise Failure(str(e)) from None
    s._cache["T"] = cert["algebra"]
    out["certified"] = True
    out["hilbert_C"] = cert["hilbert_C"]
    out["convolution"] = cert["convolution"]
    out["bound"] = s.prob.D
    return out


def _res_section(s: Session, name: str, full: bool = True) -> dict:
    res = s.res(name)
    pure, where = is_pure(res)
    sec = {
        "betti": [[[d, n] for d, n in b.items()] for b in res.betti()],
        "terminated": res.terminated,
        "pure": pure,
        "length": res.length,
        "differentials": [res.maps[i].format_rows() for i in range(1, len(res.shifts))],
        "exactness": exactness_report(res),
        "as_regular": s.as_report(name),
    }
    if not pure:
        sec["purity_witness"] = where
    if full:
        problems = verify_resolution(res)
        sec["problems"] = problems
        if problems:
            raise Failure(f"resolution of {name}: {problems[0]}")
    return sec


def cmd_resolve(s: Session) -> dict:
    out = {name: _res_section(s, name) for name in ("A", "B")}
    out["C"] = _res_section(s, "C")
    return out


def _ext_section(s: Session, name: str, checks: bool) -> dict:
    E = s.ext(name)
    sec = {"dims": _dims(E.dims()), "total": E.total_dims()}
    F = E.algebra.field
    sec["products_degree_one"] = {
        f"{_cls(a)}*{_cls(b)}": " + ".join(f"{_fmt(F, c)}*{_cls(z)}" for z, c in E.product(a, b).items()) or "0"
        for a in E.classes(1) for b in E.classes(1) if len(E.res.shifts) > 2}
    if checks:
        bad = E.check_associativity()
        sec["associative"] = not bad
        bad2 = E.check_lift_independence()
        sec["lift_independent"] = not bad2
        if bad or bad2:
            raise Failure(f"Ext of {name}: {'associativity' if bad else 'lift independence'} fails")
    try:
        F = s.frob(name)
    except NotRegular as e:
        sec["frobenius"] = f"not computed: {e}"
        return sec
    bad = F.check_relation()
    sec["frobenius"] = {
        "top": [F.h, F.l],
        "relation_holds": not bad,
        "nakayama": {f"{i},{t}": _matrix(N) for (i, t), (_, N) in F.nakayama.items()},
    }
    if bad:
        raise Failure(f"Frobenius relation fails on E({name}) for {bad[0]}")
    return sec


def cmd_ext(s: Session) -> dict:
    return {"A": _ext_section(s, "A", True), "B": _ext_section(s, "B", True),
            "C": _ext_section(s, "C", False)}


def cmd_hdet(s: Session) -> dict:
    s.require_regular("A")
    s.require_invertible()
    H = s.hdet()
    return {"hdet": _matrix(H), "invertible": True}


def cmd_det(s: Session) -> dict:
    s.require_pure_B()
    s.require_invertible()
    tw = s.tower()
    out = {"phi": [p.format() for p in tw.phis], "sizes": tw.sizes,
           "right_linear": all(not tw.check_right_linearity(i) for i in range(1, len(tw.phis))),
           "unique": tw.notes["unique"]}
    if not out["right_linear"]:
        raise Failure("a twisted differential is not right linear")
    try:
        s.require_regular("B")
    except (Undetermined, Failure) as e:
        out["det"] = f"not computed: {e}"
        raise
    out["det"] = s.det().format()
    return out


def cmd_nakayama(s: Session) -> dict:
    for name in ("A", "B"):
        s.require_regular(name)
        s.require_degree_one(name)
    s.require_pure_B()
    s.require_invertible()
    s.record_assertions()
    mu_A, mu_B = s.mu("A"), s.mu("B")
    nu, H = s.det(), s.hdet()
    T = s.twisted()
    oracle = (lambda: s._get("oracle", lambda: nakayama_oracle(T.C, res=s.res("C"))))
    res = nakayama_of_twisted(T, mu_A, mu_B, nu, H, oracle=oracle if s.oracle else None,
                              hypotheses=dict(s.hyp))
    out = {"mu_A": mu_A.format(), "mu_B": mu_B.format(), "det": nu.format(), "hdet": _matrix(H)}
    out.update(res.format())
    if s.oracle:
        mu_o = oracle()
        agree = mu_o == res.mu
        out["oracle"] = {"mu": mu_o.format(), "agreement": agree}
        if not agree:
            raise Failure("theorem route and oracle disagree")
    return out


def cmd_all(s: Session) -> dict:
    out = {"hilbert": cmd_hilbert(s), "check-twist": cmd_check_twist(s), "resolve": cmd_resolve(s),
           "ext": cmd_ext(s), "hdet": cmd_hdet(s), "det": cmd_det(s)}
    tw = s.tower()
    rep = tau_E_restrictions(tw, s.res("A"), s.det(), s.hdet(), s.res("C"))
    out["tau_E"] = {k: (_dims(v) if k in ("ext_dims_C", "convolution") else v)
                    for k, v in rep.items() if k != "violations"}
    out["tau_E"]["violations"] = [repr(v) for v in rep["violations"]]
    if not rep["ok"]:
        raise Failure(f"tau_E check fails: {rep['violations'][0]!r}")
    out["nakayama"] = cmd_nakayama(s)
    return out


DISPATCH = {"hilbert": cmd_hilbert, "check-twist": cmd_check_twist, "resolve": cmd_resolve,
            "ext": cmd_ext, "hdet": cmd_hdet, "det": cmd_det, "nakayama": cmd_nakayama, "all": cmd_all}


def run(command: str, prob: Problem, oracle: bool = False, file: str = "") -> tuple:
    """Run ``command``; returns ``(report, exit_code)``."""
    if command not in DISPATCH:
        raise ValueError(f"unknown command {command!r}")
    s = Session(prob, oracle)
    F = prob.field
    report = {
        "command": command,
        "file": file,
        "problem": prob.name,
        "field": "rational" if F.is_rational else str(F.p),
        "parameters": {k: _fmt(F, v) for k, v in sorted(prob.params.items())},
        "bounds": {"D": prob.D, "H": prob.H},
        "assertions": sorted(prob.assertions),
        "order": ORDER_TAG,
    }
    code = EXIT_OK
    try:
        report["results"] = DISPATCH[command](s)
        report["status"] = "ok"
    except (Failure, NotTwisting, Violation, DegeneratePairing, TowerError, LiftError) as e:
        code = EXIT_FAIL
        report["status"] = "verification failure"
        report["error"] = str(e)
    except TailError as e:
        code = EXIT_FAIL if e.dimension is None else EXIT_UNDETERMINED
        report["status"] = "verification failure" if e.dimension is None else "undetermined at bound"
        report["error"] = str(e)
    except (Undetermined, NotRegular, BoundTooSmall, DegreeBoundError) as e:
        code = EXIT_UNDETERMINED
        report["status"] = "undetermined at bound"
        report["error"] = str(e)
    report["hypotheses"] = dict(sorted(s.hyp.items()))
    report["caveats"] = s.caveats + [f"all regularity statements hold within bounds D={prob.D}, H={prob.H}"]
    report["exit_code"] = code
    return report, code


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_report(text: str) -> dict:
    return json.loads(text)


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(obj)}")
    return "\n".join(lines)


def _flat(v) -> bool:
    if isinstance(v, dict):
        return False
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x))
               for x in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected k=v")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gforge", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file")
    ap.add_argument("--param", action="append", type=_param, default=[], metavar="K=V")
    ap.add_argument("--max-degree", type=int, dest="D")
    ap.add_argument("--max-homological", type=int, dest="H")
    ap.add_argument("--field", default=None, help="rational or a prime p")
    g = ap.add_mutually_exclusive_group()
    g.add_argument("--assert-noetherian", action="store_true")
    g.add_argument("--assert-koszul", action="store_true")
    ap.add_argument("--oracle", action="store_true")
    ap.add_argument("--output", choices=("json", "text"), default="json")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        prob = load_problem(args.file, dict(args.param), args.field, args.D, args.H)
    except (ProblemError, ParseError) as e:
        print(json.dumps({"status": "parse error", "error": str(e), "exit_code": EXIT_PARSE},
                         sort_keys=True), file=sys.stderr)
        return EXIT_PARSE
    if args.assert_noetherian and "noetherian" not in prob.assertions:
        prob.assertions.append("noetherian")
    if args.assert_koszul and "koszul" not in prob.assertions:
        prob.assertions.append("koszul")
    report, code = run(args.command, prob, args.oracle, args.file)
    sys.stdout.write(dumps(report) if args.output == "json" else render_text(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
