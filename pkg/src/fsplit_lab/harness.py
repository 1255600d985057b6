"""Experiment runner: verifies the containment theorems at desk scale and
emits machine-readable reports.

Experiment kinds
----------------
* ``thmA``      a^(s+t) inside tau(a^(s-eps)) tau(a^(t-eps))
* ``thmB``      p^(2hn) inside p^n for n = 1..n_max
* ``lemma22``   tau((p^(N))^t) inside p^(floor(Nt)-h+1)
* ``eq2``       p^(N) inside p^(ceil(Ns)-h) p^(ceil(N(1-s))-h)
* ``remark46``  p^(hn+1) inside p * p^(h(n-2)+1)
* ``prop21``    tau((a^n)^t) = tau(a^(nt)) and tau(a^(t+n)) = a^n tau(a^t)
* ``fsplit-suite``  Fedder / diagonal / strong-F-regularity probes
* ``containment``   ad-hoc symbolic-vs-ordinary containment (negative controls)

Verdicts: holds | fails | undetermined | refused | partial-evidence | error.
A fails verdict always carries a witness generator that re-verifies: it lies
in the left ideal and has nonzero normal form against the right.

Honesty rules: hypothesis flags that are consumed without machine
verification land in the report's assumptions list; an unvalidated
saturation engine output (a lower bound for the symbolic power) is never
allowed to certify a containment, only to produce partial evidence or a
sound failure witness.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .constructions import RingPresentation, determinantal_presentation, segre_2x2
from .errors import AlgebraError, PreconditionError
from .frobenius import (
    TauUndetermined,
    diag_fsplit_check,
    fedder_fsplit,
    strong_freg_probe,
    test_ideal_pair,
    test_ideal_pair_power,
)
from .groebner import Ideal, ResourceLimitExceeded, ideal_equal
from .ideal_ops import ideal_power, ideal_product, multiply_by_poly
from .poly import PolyRing, Polynomial, PrimeField, format_poly, parse_poly
from .rationals import exact_ceil, exact_floor, format_rational, parse_rational
from .symbolic import (
    PrimeSpec,
    dep_determinantal_symbolic,
    exact_engine_available,
    ordinary_power_preimage,
    symbolic_power,
    symbolic_power_saturation,
)


@dataclass
class ExperimentSpec:
    kind: str
    name: str
    ring: RingPresentation
    prime: PrimeSpec | None = None
    parameters: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    KINDS = ("thmA", "thmB", "lemma22", "eq2", "remark46", "prop21", "fsplit-suite", "containment")


def _build_ring(cfg: dict) -> RingPresentation:
    if "file" in cfg:
        return RingPresentation.load(cfg["file"])
    if "builder" in cfg:
        b = cfg["builder"]
        p = PrimeField(int(cfg["p"]))
        if b == "determinantal":
            pres, _ = determinantal_presentation(int(cfg["m"]), int(cfg["n"]), int(cfg["t"]), p)
            return pres
        if b == "segre_2x2":
            pres, _ = segre_2x2(p)
            return pres
        if b == "polynomial":
            ring = PolyRing(p, cfg["variables"])
            return RingPresentation(ring, Ideal(ring, []), dict(cfg.get("flags", {})))
        raise PreconditionError(f"unknown ring builder {b!r}")
    return RingPresentation.from_json(cfg)


def _build_prime(pres: RingPresentation, cfg: dict) -> PrimeSpec:
    ring = pres.ambient
    lift = [parse_poly(ring, s) for s in cfg["lift"]]
    witness = parse_poly(ring, cfg["witness"]) if cfg.get("witness") else None
    det = tuple(cfg["determinantal"]) if cfg.get("determinantal") else None
    return PrimeSpec(pres, lift, witness=witness, determinantal=det)


def load_experiment(cfg: dict) -> ExperimentSpec:
    kind = cfg["kind"]
    if kind not in ExperimentSpec.KINDS:
        raise PreconditionError(f"unknown experiment kind {kind!r}")
    pres = _build_ring(cfg["ring"])
    prime = _build_prime(pres, cfg["prime"]) if cfg.get("prime") else None
    return ExperimentSpec(
        kind=kind,
        name=cfg.get("name", kind),
        ring=pres,
        prime=prime,
        parameters=dict(cfg.get("parameters", {})),
        raw=cfg,
    )


# ---------------------------------------------------------------------------
# containment checking with re-verified witnesses
# ---------------------------------------------------------------------------

def _containment_check(label: str, left: Ideal, right: Ideal) -> dict:
    """Check left subseteq right; on failure record a generator of the left
    ideal with nonzero normal form, and re-verify it."""
    gb = right.groebner() if not (right.is_homogeneous() and right.ring.order.kind == "grevlex" and left.gens) else None
    witness = None
    for g in left.gens:
        if not right.contains(g):
            witness = g
            break
    holds = witness is None
    out = {"label": label, "holds": holds}
    if witness is not None:
        # re-verify: the witness is a generator of the left ideal and its
        # normal form against the right ideal is nonzero
        nf = right.groebner().reduce(witness)
        if nf.is_zero():
            raise AlgebraError("internal: failure witness did not re-verify")
        out["witness"] = format_poly(witness)
        out["witness_normal_form"] = format_poly(nf)
    _ = gb
    return out


def _equality_check(label: str, left: Ideal, right: Ideal) -> dict:
    a = _containment_check(label + " (left in right)", left, right)
    b = _containment_check(label + " (right in left)", right, left)
    out = {"label": label, "holds": a["holds"] and b["holds"]}
    for side in (a, b):
        if "witness" in side:
            out["witness"] = side["witness"]
            out["witness_normal_form"] = side["witness_normal_form"]
            break
    return out


def _symbolic_exact(P: PrimeSpec, c: int, report: dict):
    """Symbolic power through a machine-certified exact engine."""
    engine = exact_engine_available(P)
    if engine is None:
        raise PreconditionError("no exact symbolic engine available for this prime")
    ideal, label = symbolic_power(P, c, engine)
    report.setdefault("engines", {})[str(c)] = label
    return ideal


def _power_structure(P: PrimeSpec):
    """(base ideal, certified) when p^(N) = base^N exactly for all N:
    variable primes (symbolic = ordinary) and determinantal primes whose
    matrix admits only size-t minors."""
    if P.variable_prime_variables() is not None and not P.ambient.defining.gens:
        return Ideal(P.ring, list(P.lift_gens))
    if P.determinantal is not None and not P.ambient.defining.gens:
        m, n, t = P.determinantal
        if min(m, n) == t:
            return Ideal(P.ring, list(P.lift_gens))
    return None


# ---------------------------------------------------------------------------
# the verifier operations
# ---------------------------------------------------------------------------

def verify_thmA(spec: ExperimentSpec) -> dict:
    report: dict = {}
    pres = spec.ring
    if pres.defining.gens:
        raise PreconditionError("thmA runs in a polynomial ambient ring only")
    ring = pres.ambient
    prm = spec.parameters
    a = Ideal(ring, [parse_poly(ring, s) for s in prm["a"]])
    if not a.gens:
        raise PreconditionError("thmA wants a nonzero ideal")
    s = parse_rational(str(prm["s"]))
    t = parse_rational(str(prm["t"]))
    eps = parse_rational(str(prm["epsilon"]))
    if s <= 0 or t <= 0:
        raise PreconditionError("thmA wants positive exponents s, t")
    if (s + t).denominator != 1:
        raise PreconditionError("thmA wants s + t integral")
    if not (0 < eps <= min(s, t)):
        raise PreconditionError("thmA wants epsilon in (0, min(s,t)]")
    e_max = int(prm.get("e_max", 4))
    total = ideal_power(a, int(s + t))
    tau_s = test_ideal_pair(a, s - eps, e_max)
    tau_t = test_ideal_pair(a, t - eps, e_max)
    report["tau_exponents"] = [format_rational(s - eps), format_rational(t - eps)]
    report["tau_stabilized_at"] = [tau_s.stabilized_at_e, tau_t.stabilized_at_e]
    rhs = ideal_product(tau_s.ideal, tau_t.ideal)
    check = _containment_check(
        f"a^{int(s+t)} in tau(a^{format_rational(s - eps)}) tau(a^{format_rational(t - eps)})",
        total,
        rhs,
    )
    report["checks"] = [check]
    report["verdict"] = "holds" if check["holds"] else "fails"
    return report


def _consume_hypotheses(spec: ExperimentSpec, report: dict) -> None:
    pres = spec.ring
    assumptions = report.setdefault("assumptions", [])
    if not pres.defining.gens:
        return  # polynomial rings need no flags
    if not pres.flag("asserted_sfr"):
        raise PreconditionError("hypothesis flags missing: asserted_sfr")
    assumptions.append("asserted_sfr consumed from ring flags (not machine-verified)")
    if pres.flag("asserted_diag_fsplit"):
        assumptions.append("asserted_diag_fsplit consumed from ring flags (not machine-verified)")
    else:
        cert = diag_fsplit_check(pres, e_max=1)
        if cert is None:
            raise PreconditionError("no diagonal splitting certificate found at e=1")
        report["diagonal_certificate"] = cert.to_json()


def verify_thmB(spec: ExperimentSpec) -> dict:
    report: dict = {}
    P = spec.prime
    if P is None:
        raise PreconditionError("thmB needs a prime")
    _consume_hypotheses(spec, report)
    n_max = int(spec.parameters.get("n_max", 1))
    h = P.height()
    report["height"] = h
    engine = exact_engine_available(P)
    checks = []
    partial = False
    for n in range(1, n_max + 1):
        c = 2 * h * n
        ordinary = ordinary_power_preimage(P, n)
        if engine is not None:
            sym = _symbolic_exact(P, c, report)
            label = f"p^({c}) in p^{n} [exact {engine} engine]"
        else:
            sym = symbolic_power_saturation(P, c)
            label = f"p^({c}) in p^{n} [saturation lower bound]"
            partial = True
        checks.append(_containment_check(label, sym, ordinary))
    report["checks"] = checks
    if all(c["holds"] for c in checks):
        report["verdict"] = "partial-evidence" if partial else "holds"
        if partial:
            report.setdefault("assumptions", []).append(
                "saturation engine unvalidated for this prime: containment of the "
                "lower bound is evidence, not proof"
            )
    else:
        report["verdict"] = "fails"
    return report


def verify_lemma22(spec: ExperimentSpec) -> dict:
    report: dict = {}
    P = spec.prime
    if P is None:
        raise PreconditionError("lemma22 needs a prime")
    if spec.ring.defining.gens:
        raise PreconditionError("lemma22 runs in a polynomial ambient ring only")
    N = int(spec.parameters["N"])
    t = parse_rational(str(spec.parameters["t"]))
    e_max = int(spec.parameters.get("e_max", 4))
    if N <= 0 or t <= 0:
        raise PreconditionError("lemma22 wants N > 0 and t > 0")
    h = P.height()
    report["height"] = h
    if N * t < h - 1:
        raise PreconditionError("lemma22 wants N*t >= h - 1")
    if exact_engine_available(P) is None:
        raise PreconditionError(
            "lemma22 refused: no exact symbolic engine (an under-approximated "
            "right side could fabricate a failure)"
        )
    base = _power_structure(P)
    if base is not None:
        tau = test_ideal_pair_power(base, N, t, e_max)
        report["tau_via"] = "factored power chain"
    else:
        sym_N = _symbolic_exact(P, N, report)
        tau = test_ideal_pair(sym_N, t, e_max)
        report["tau_via"] = "direct chain on the symbolic power"
    report["tau_stabilized_at"] = tau.stabilized_at_e
    k = exact_floor(N * t) - h + 1
    rhs = _symbolic_exact(P, k, report) if k > 0 else Ideal(P.ring, [P.ring.one()])
    check = _containment_check(f"tau((p^({N}))^{format_rational(t)}) in p^({max(k, 0)})", tau.ideal, rhs)
    report["checks"] = [check]
    report["verdict"] = "holds" if check["holds"] else "fails"
    return report


def verify_eq2(spec: ExperimentSpec) -> dict:
    report: dict = {}
    P = spec.prime
    if P is None:
        raise PreconditionError("eq2 needs a prime")
    _consume_hypotheses(spec, report)
    N = int(spec.parameters["N"])
    s = parse_rational(str(spec.parameters["s"]))
    h = P.height()
    report["height"] = h
    if N <= 2 * h:
        raise PreconditionError("eq2 wants N > 2h")
    if not (Fraction(h, N) < s < 1 - Fraction(h, N)):
        raise PreconditionError("eq2 wants s strictly inside (h/N, 1 - h/N)")
    if exact_engine_available(P) is None:
        raise PreconditionError("eq2 refused: exact symbolic engine required")
    # the ceiling arithmetic below is exactly the epsilon-room inequality:
    # some eps > 0 has Ns - eps > ceil(Ns) - 1
    from .rationals import epsilon_below

    eps = epsilon_below(N * s)
    assert N * s - eps > exact_ceil(N * s) - 1
    e1 = exact_ceil(N * s) - h
    e2 = exact_ceil(N * (1 - s)) - h
    left = _symbolic_exact(P, N, report)
    f1 = _symbolic_exact(P, e1, report) if e1 > 0 else Ideal(P.ring, [P.ring.one()])
    f2 = _symbolic_exact(P, e2, report) if e2 > 0 else Ideal(P.ring, [P.ring.one()])
    rhs = ideal_product(f1, f2)
    check = _containment_check(
        f"p^({N}) in p^({max(e1,0)}) p^({max(e2,0)})", left, rhs
    )
    report["checks"] = [check]
    report["verdict"] = "holds" if check["holds"] else "fails"
    return report


def verify_remark46(spec: ExperimentSpec) -> dict:
    report: dict = {}
    P = spec.prime
    if P is None:
        raise PreconditionError("remark46 needs a prime")
    _consume_hypotheses(spec, report)
    n = int(spec.parameters["n"])
    if n < 2:
        raise PreconditionError("remark46 wants n >= 2")
    h = P.height()
    report["height"] = h
    if exact_engine_available(P) is None:
        raise PreconditionError("remark46 refused: exact symbolic engine required")
    left = _symbolic_exact(P, h * n + 1, report)
    k = h * (n - 2) + 1
    inner = _symbolic_exact(P, k, report) if k > 0 else Ideal(P.ring, [P.ring.one()])
    rhs_gens = []
    for q in P.lift_gens:
        rhs_gens.extend(multiply_by_poly(inner, q).gens)
    rhs_gens.extend(multiply_by_poly(inner, g).gens for g in [])
    rhs = Ideal(P.ring, rhs_gens + list(P.ambient.defining.gens))
    check = _containment_check(f"p^({h*n+1}) in p * p^({max(k,0)})", left, rhs)
    report["checks"] = [check]
    report["verdict"] = "holds" if check["holds"] else "fails"
    return report


def verify_prop21(spec: ExperimentSpec) -> dict:
    report: dict = {}
    if spec.ring.defining.gens:
        raise PreconditionError("prop21 identities run in a polynomial ambient ring only")
    ring = spec.ring.ambient
    prm = spec.parameters
    a = Ideal(ring, [parse_poly(ring, s) for s in prm["a"]])
    t = parse_rational(str(prm["t"]))
    n = int(prm["n"])
    e_max = int(prm.get("e_max", 4))
    checks = []
    # (b): tau((a^n)^t) = tau(a^(n t))
    lhs = test_ideal_pair(ideal_power(a, n), t, e_max)
    rhs = test_ideal_pair(a, n * t, e_max)
    checks.append(_equality_check(f"tau((a^{n})^{format_rational(t)}) = tau(a^{format_rational(n*t)})", lhs.ideal, rhs.ideal))
    # (c): tau(a^(t+n)) = a^n tau(a^t), valid once t >= (number of generators) - 1
    r = len(a.gens)
    if t >= r - 1:
        lhs_c = test_ideal_pair(a, t + n, e_max)
        rhs_c = ideal_product(ideal_power(a, n), test_ideal_pair(a, t, e_max).ideal)
        checks.append(_equality_check(f"tau(a^{format_rational(t+n)}) = a^{n} tau(a^{format_rational(t)})", lhs_c, rhs_c))
    else:
        report.setdefault("notes", []).append(
            f"Skoda identity skipped: t={format_rational(t)} below generator bound {r - 1}"
        )
    report["checks"] = checks
    report["verdict"] = "holds" if all(c["holds"] for c in checks) else "fails"
    return report


def verify_fsplit_suite(spec: ExperimentSpec) -> dict:
    report: dict = {}
    pres = spec.ring
    prm = spec.parameters
    checks = []
    if "expect_fsplit" in prm:
        cert = fedder_fsplit(pres.defining)
        got = cert is not None
        ok = got == bool(prm["expect_fsplit"])
        entry = {"label": f"F-split == {bool(prm['expect_fsplit'])}", "holds": ok, "observed": got}
        if cert is not None:
            entry["certificate"] = cert.to_json()
        checks.append(entry)
    if "expect_diag" in prm:
        cert = diag_fsplit_check(pres, e_max=int(prm.get("e_max", 1)))
        got = cert is not None
        ok = got == bool(prm["expect_diag"])
        entry = {"label": f"diagonally F-split == {bool(prm['expect_diag'])}", "holds": ok, "observed": got}
        if cert is not None:
            entry["certificate"] = cert.to_json()
        checks.append(entry)
    if "sfr_c" in prm:
        c = parse_poly(pres.ambient, prm["sfr_c"])
        probe = strong_freg_probe(pres.defining, c, e_max=int(prm.get("e_max", 2)))
        expected = prm.get("expect_sfr_verdict")
        entry = {
            "label": "strong F-regularity probe",
            "holds": expected is None or probe["verdict"] == expected,
            "observed": probe["verdict"],
        }
        if probe["verdict"] != "undetermined":
            entry["e"] = probe["e"]
            entry["witness"] = format_poly(probe["witness"])
            report.setdefault("assumptions", []).append(probe["assumption"])
        checks.append(entry)
    if not checks:
        raise PreconditionError("fsplit-suite needs at least one expectation parameter")
    report["checks"] = checks
    report["verdict"] = "holds" if all(c["holds"] for c in checks) else "fails"
    return report


def verify_containment(spec: ExperimentSpec) -> dict:
    """Ad-hoc containment between symbolic/ordinary powers of one prime.

    Used for negative controls; the verdict semantics are identical to the
    theorem checks (failure carries a re-verified witness)."""
    report: dict = {}
    P = spec.prime
    if P is None:
        raise PreconditionError("containment needs a prime")
    prm = spec.parameters

    def side(d: dict) -> Ideal:
        if "symbolic" in d:
            return _symbolic_exact(P, int(d["symbolic"]), report)
        if "ordinary" in d:
            return ordinary_power_preimage(P, int(d["ordinary"]))
        raise PreconditionError("containment side needs 'symbolic' or 'ordinary'")

    left = side(prm["left"])
    right = side(prm["right"])
    check = _containment_check(prm.get("label", "claimed containment"), left, right)
    report["checks"] = [check]
    report["verdict"] = "holds" if check["holds"] else "fails"
    return report


_VERIFIERS = {
    "thmA": verify_thmA,
    "thmB": verify_thmB,
    "lemma22": verify_lemma22,
    "eq2": verify_eq2,
    "remark46": verify_remark46,
    "prop21": verify_prop21,
    "fsplit-suite": verify_fsplit_suite,
    "containment": verify_containment,
}


def run_experiment(spec: ExperimentSpec) -> dict:
    t0 = time.perf_counter()
    out = {
        "name": spec.name,
        "kind": spec.kind,
        "spec": spec.raw,
    }
    try:
        out.update(_VERIFIERS[spec.kind](spec))
    except PreconditionError as ex:
        out["verdict"] = "refused"
        out["reason"] = str(ex)
    except TauUndetermined as ex:
        out["verdict"] = "undetermined"
        out["reason"] = str(ex)
    except ResourceLimitExceeded as ex:
        out["verdict"] = "resource-exceeded"
        out["reason"] = str(ex)
    except AlgebraError as ex:
        out["verdict"] = "error"
        out["reason"] = str(ex)
    out["timings"] = {"seconds": round(time.perf_counter() - t0, 3)}
    return out


def run_suite(config: list[dict] | str, jobs: int = 1) -> dict:
    """Execute every experiment in the config (a list or a JSON file path);
    per-experiment errors are isolated.  Results merge in config order."""
    if isinstance(config, str):
        with open(config) as fh:
            config = json.load(fh)
    specs = []
    results = []
    for i, cfg in enumerate(config):
        try:
            specs.append(load_experiment(cfg))
        except (AlgebraError, KeyError, ValueError) as ex:
            specs.append(None)
            results.append(
                {
                    "name": cfg.get("name", f"experiment-{i}"),
                    "kind": cfg.get("kind", "?"),
                    "spec": cfg,
                    "verdict": "error",
                    "reason": f"config error: {ex}",
                    "timings": {"seconds": 0.0},
                }
            )
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        todo = [s for s in specs if s is not None]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(run_experiment, todo))
        it = iter(done)
        merged = [next(it) if s is not None else None for s in specs]
        results = [r for r in (m if m is not None else results.pop(0) for m in merged)]
    else:
        out = []
        errs = iter(results)
        for s in specs:
            out.append(run_experiment(s) if s is not None else next(errs))
        results = out

    counts: dict[str, int] = {}
    for r in results:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    return {
        "experiments": results,
        "summary": {"counts": counts, "total": len(results)},
        "exit_code": 0 if counts.get("fails", 0) == 0 else 1,
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def strip_timings(obj):
    """Copy of a report with timing fields removed, for determinism checks."""
    if isinstance(obj, dict):
        return {k: strip_timings(v) for k, v in obj.items() if k != "timings"}
    if isinstance(obj, list):
        return [strip_timings(v) for v in obj]
    return obj


def summary_table(report: dict) -> str:
    lines = []
    width = max((len(r["name"]) for r in report["experiments"]), default=4)
    lines.append(f"{'experiment'.ljust(width)}  {'kind'.ljust(12)}  verdict")
    lines.append("-" * (width + 25))
    for r in report["experiments"]:
        lines.append(f"{r['name'].ljust(width)}  {r['kind'].ljust(12)}  {r['verdict']}")
    c = report["summary"]["counts"]
    lines.append("-" * (width + 25))
    lines.append(
        f"total {report['summary']['total']}: "
        + ", ".join(f"{k}={v}" for k, v in sorted(c.items()))
    )
    return "\n".join(lines)
