"""Command-line front end and the deterministic regression suite.

Every job is described by a flat JobSpec dict; identical specs produce
byte-identical canonical-JSON outputs, which makes results content
addressable: the suite caches records under sha256(canonical spec) and
compares sha256(canonical outputs) digests against a committed baseline.
Wall-clock duration is recorded for humans but kept out of digests and out
of printed tables, so two runs of the same suite print identical bytes.

Exit codes: 0 success, 1 usage error, 2 mathematical check failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .coeffring import CoeffRingSpec
from .deltaring import (
    congruence_check,
    cyclic_chains,
    elementary_rank2_chains,
    frobenius_chain_check,
    parse_delta_ring,
    sheaf_eval,
)
from .errors import BaselineMismatch, FGLError
from .grouprings import AbelianPType, group_cohomology_ring, level_ring, quotient_to_level
from .laws import (
    FormalGroupLaw,
    additive_law,
    honda_law,
    lubin_tate_height2_law,
    multiplicative_law,
)
from .tate import euler_image_in_level, factor_invertibility_check, level_to_tate_map
from .weierstrass import weierstrass_prepare

LAWS = ("multiplicative", "additive", "honda", "lubinTate2")


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def job_hash(job: dict) -> str:
    return hashlib.sha256(canonical_json(job).encode()).hexdigest()


def outputs_digest(outputs: dict) -> str:
    return hashlib.sha256(canonical_json(outputs).encode()).hexdigest()


def _build_law(job: dict) -> FormalGroupLaw:
    name = job["law"]
    p = int(job["p"])
    trunc = int(job["trunc"])
    if name == "multiplicative":
        pprec = job.get("pprec")
        spec = CoeffRingSpec(p=p, p_precision=int(pprec) if pprec else None)
        return multiplicative_law(spec, trunc)
    if name == "additive":
        pprec = job.get("pprec")
        spec = CoeffRingSpec(p=p, p_precision=int(pprec) if pprec else None)
        return additive_law(spec, trunc)
    if name == "honda":
        height = int(job.get("height") or 1)
        spec = CoeffRingSpec(p=p, p_precision=1)
        return honda_law(spec, height, trunc)
    if name == "lubinTate2":
        spec = CoeffRingSpec(
            p=p, p_precision=int(job.get("pprec") or 8),
            deformation_params=1, u_degree_cap=int(job.get("udeg") or 6),
        )
        return lubin_tate_height2_law(spec, trunc)
    raise ValueError(f"unknown law {name!r} (choose from {', '.join(LAWS)})")


def _default_trunc(job: dict) -> int:
    command = job["command"]
    name = job.get("law", "multiplicative")
    p = int(job.get("p", 2))
    n = 2 if name == "lubinTate2" else int(job.get("height") or 1)
    if command == "series":
        return max(16, int(job.get("m", 1)) + 2)
    if command == "prepare":
        return max(16, p ** (int(job.get("M", 1)) * n) + 4)
    if command in ("groupring", "level", "tate"):
        gtype = AbelianPType.parse(str(job.get("type", "1")))
        need = max(p ** (m * n) for m in gtype.exponents) + 4
        if command == "level" and name == "lubinTate2" and gtype.rank > 1:
            # triangular divisions are exact once the cap clears the
            # nilpotency depth of the stage-1 quotient
            pprec = int(job.get("pprec") or 8)
            udeg = int(job.get("udeg") or 6)
            need = max(need, 6 * (pprec + udeg - 1))
        return max(16, need)
    return 16


def run_job(job: dict) -> dict:
    """Execute one JobSpec; returns the full ResultRecord."""
    job = dict(job)
    command = job["command"]
    if "trunc" not in job or not job["trunc"]:
        job["trunc"] = _default_trunc(job)
    started = time.perf_counter()
    outputs = _dispatch(command, job)
    duration = time.perf_counter() - started
    return {
        "hash": job_hash(_canonical_job(job)),
        "job": _canonical_job(job),
        "outputs": outputs,
        "digest": outputs_digest(outputs),
        "version": __version__,
        "duration_s": round(duration, 6),
    }


def _canonical_job(job: dict) -> dict:
    keep = {}
    for key in ("command", "law", "p", "m", "M", "height", "type", "pprec",
                "udeg", "trunc", "ring", "samples", "r", "seed"):
        if key in job and job[key] is not None:
            keep[key] = job[key]
    return keep


def _dispatch(command: str, job: dict) -> dict:
    if command == "series":
        law = _build_law(job)
        m = int(job.get("m", 1))
        series = law.n_series(m).series
        return {"command": command, "law": law.name, "p": law.spec.p, "m": m,
                "trunc": law.cap, "series": series.to_json()}
    if command == "check-axioms":
        law = _build_law(job)
        axioms = law.check_axioms()
        return {"command": command, "law": law.name, "p": law.spec.p,
                "trunc": law.cap, "axioms": axioms, "passed": all(axioms.values())}
    if command == "prepare":
        law = _build_law(job)
        M = int(job.get("M", 1))
        pprec = law.spec.p_precision
        warning = None
        if pprec is not None and pprec <= M:
            warning = (f"p-precision {pprec} cannot distinguish p^{M} from 0; "
                       "valuation claims are vacuous")
        fact = weierstrass_prepare(law.n_series(law.spec.p ** M).series)
        out = {"command": command, "law": law.name, "p": law.spec.p, "M": M,
               "degree": fact.degree, "unit": fact.unit.to_json(),
               "distinguished": fact.distinguished.to_json()}
        if warning:
            out["warning"] = warning
        return out
    if command == "groupring":
        law = _build_law(job)
        gtype = AbelianPType.parse(str(job["type"]))
        alg = group_cohomology_ring(law, gtype)
        out = alg.to_json()
        out.update({"command": command, "law": law.name, "p": law.spec.p,
                    "type": str(gtype), "dual_identified_with_group": True})
        return out
    if command == "level":
        law = _build_law(job)
        gtype = AbelianPType.parse(str(job["type"]))
        alg = level_ring(law, gtype)
        quotient_to_level(law, gtype)  # raises if any relation survives
        out = alg.to_json()
        out.update({"command": command, "law": law.name, "p": law.spec.p,
                    "type": str(gtype), "dual_identified_with_group": True,
                    "ambient_relations_killed": True})
        return out
    if command == "tate":
        law = _build_law(job)
        gtype = AbelianPType.parse(str(job["type"]))
        report = level_to_tate_map(law, gtype)
        factors = factor_invertibility_check(law, gtype)
        euler_img = None
        if gtype.is_cyclic and gtype.exponents[0] == 1:
            euler_img = euler_image_in_level(law, gtype).to_json()
        return {"command": command, "law": law.name, "p": law.spec.p,
                "type": str(gtype), "levelRank": report.source_rank,
                "tateRank": report.target_rank, "iso": report.bijective,
                "factorsInvertible": factors.all_invertible,
                "factorsChecked": factors.factors_checked,
                "eulerImageInLevel": euler_img,
                "passed": report.bijective and factors.all_invertible}
    if command == "delta-check":
        ring = parse_delta_ring(str(job["ring"]),
                                default_p=int(job["p"]) if job.get("p") else None)
        samples = int(job.get("samples", 100))
        seed = int(job.get("seed", 0))
        rng = random.Random(seed)
        pairs = [(ring.random_element(rng), ring.random_element(rng))
                 for _ in range(samples)]
        report = ring.check_axioms(pairs)
        return {"command": command, "ring": str(job["ring"]), "p": ring.p,
                "samples": samples, "seed": seed, **report}
    if command == "sheaf-eval":
        ring = parse_delta_ring(str(job["ring"]),
                                default_p=int(job["p"]) if job.get("p") else None)
        r = int(job.get("r", 1))
        base = CoeffRingSpec(p=ring.p, p_precision=1)
        sv = sheaf_eval(ring, base, r)
        comp_ok = True
        for r1 in range(0, 3):
            for r2 in range(0, 3):
                left = sheaf_eval(ring, base, r1).compose(sheaf_eval(ring, base, r2))
                right = sheaf_eval(ring, base, r1 + r2)
                comp_ok = comp_ok and all(
                    left.apply_to_generator(g) == right.apply_to_generator(g)
                    for g in ring.generators
                )
        rng = random.Random(int(job.get("seed", 0)))
        cong = congruence_check(ring, base,
                                [ring.random_element(rng) for _ in range(20)],
                                r=max(r, 1))
        chains_ok = frobenius_chain_check(ring, 2, cyclic_chains(2))["passed"] and \
            frobenius_chain_check(ring, 2, elementary_rank2_chains(ring.p))["passed"]
        return {"command": command, "ring": str(job["ring"]), "r": r,
                "generator_images": {g: sv.apply_to_generator(g).to_json()
                                     for g in ring.generators},
                "composition_law": comp_ok, "congruence": cong["passed"],
                "chains": chains_ok,
                "passed": comp_ok and cong["passed"] and chains_ok}
    raise ValueError(f"unknown command {command!r}")


def record_passed(record: dict) -> bool:
    outputs = record["outputs"]
    return bool(outputs.get("passed", True))


# -- suite -----------------------------------------------------------------------


def cache_dir_from_env(explicit: str | None = None) -> str:
    return explicit or os.environ.get("FGL_CACHE_DIR") or ".fgl-cache"


def _cache_load(cache: str, h: str) -> dict | None:
    path = os.path.join(cache, h + ".json")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            record = json.load(fh)
        if record.get("hash") != h or "outputs" not in record:
            return None
        if record.get("digest") != outputs_digest(record["outputs"]):
            return None  # corrupted entry: recompute transparently
        return record
    except (OSError, ValueError):
        return None


def _cache_store(cache: str, record: dict) -> None:
    os.makedirs(cache, exist_ok=True)
    path = os.path.join(cache, record["hash"] + ".json")
    fd, tmp = tempfile.mkstemp(dir=cache, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(record))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_suite(config_path: str, baseline_path: str | None = None,
              cache: str | None = None, workers: int = 1,
              update_baseline: bool = False, out=sys.stdout) -> int:
    with open(config_path, "r", encoding="utf-8") as fh:
        jobs = json.load(fh)
    if not isinstance(jobs, list):
        raise ValueError("suite config must be a JSON list of job specs")
    cache = cache_dir_from_env(cache)

    def run_one(job: dict) -> dict:
        filled = dict(job)
        if "trunc" not in filled or not filled["trunc"]:
            filled["trunc"] = _default_trunc(filled)
        h = job_hash(_canonical_job(filled))
        cached = _cache_load(cache, h)
        if cached is not None:
            return cached
        record = run_job(job)
        _cache_store(cache, record)
        return record

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_one, jobs))
    else:
        records = [run_one(job) for job in jobs]

    all_passed = True
    for record in records:
        ok = record_passed(record)
        all_passed = all_passed and ok
        label = " ".join(
            str(record["job"].get(k)) for k in ("command", "law", "p", "type", "m", "M", "r")
            if record["job"].get(k) is not None
        )
        print(f"{'PASS' if ok else 'FAIL'}  {record['digest'][:16]}  {label}", file=out)
    digests = sorted(record["digest"] for record in records)
    print(f"jobs: {len(records)}  suite-digest: "
          f"{hashlib.sha256(canonical_json(digests).encode()).hexdigest()[:16]}", file=out)

    if baseline_path:
        if update_baseline:
            with open(baseline_path, "w", encoding="utf-8") as fh:
                fh.write(canonical_json(digests) + "\n")
        else:
            try:
                with open(baseline_path, "r", encoding="utf-8") as fh:
                    expected = json.load(fh)
            except (OSError, ValueError) as exc:
                raise BaselineMismatch(f"cannot read baseline: {exc}")
            if expected != digests:
                missing = sorted(set(expected) - set(digests))
                extra = sorted(set(digests) - set(expected))
                raise BaselineMismatch(
                    f"baseline mismatch: missing {missing[:4]}, new {extra[:4]}"
                )
            print("baseline: OK", file=out)
    return 0 if all_passed else 2


# -- argument parsing -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _add_law_args(sub):
    sub.add_argument("--law", required=True, choices=LAWS)
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--height", type=int, help="height for the honda law")
    sub.add_argument("--pprec", type=int, help="p-precision N (omit for exact)")
    sub.add_argument("--udeg", type=int, help="u-degree cap for lubinTate2")
    sub.add_argument("--trunc", type=int, help="series degree cap")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fgl", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("series", parents=[], help="print the m-series of a law")
    _add_law_args(s)
    s.add_argument("--m", type=int, required=True)

    s = subs.add_parser("check-axioms", help="verify unit/commutativity/associativity")
    _add_law_args(s)

    s = subs.add_parser("prepare", help="Weierstrass preparation of [p^M](x)")
    _add_law_args(s)
    s.add_argument("--M", type=int, required=True)

    for name in ("groupring", "level", "tate"):
        s = subs.add_parser(name)
        _add_law_args(s)
        s.add_argument("--type", required=True, help="comma-separated exponents, e.g. 2 or 1,1")
        if name == "tate":
            s.add_argument("--report", choices=("json", "text"), default="json")

    s = subs.add_parser("delta-check", help="check delta-ring laws on random samples")
    s.add_argument("--ring", required=True, help='e.g. "Z[t]; psi t -> t^2"')
    s.add_argument("--p", type=int, help="prime (may also appear in the ring string)")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)

    s = subs.add_parser("sheaf-eval", help="evaluate the deformation sheaf")
    s.add_argument("--ring", required=True)
    s.add_argument("--p", type=int, help="prime (may also appear in the ring string)")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)

    s = subs.add_parser("suite", help="run a suite config with caching and baseline diff")
    s.add_argument("--config", required=True)
    s.add_argument("--baseline")
    s.add_argument("--cache")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--update-baseline", action="store_true")

    for name, sub in subs.choices.items():
        if name != "suite":
            sub.add_argument("--output", help="write the full result record to a file")
            sub.add_argument("--format", choices=("json", "text"), default="json")
    return parser


def _job_from_args(args: argparse.Namespace) -> dict:
    job = {"command": args.command}
    for key in ("law", "p", "m", "M", "height", "type", "pprec", "udeg",
                "trunc", "ring", "samples", "r", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            job[key] = value
    return job


def _print_text(outputs: dict, out) -> None:
    for key in sorted(outputs):
        print(f"{key}: {canonical_json(outputs[key])}", file=out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "suite":
        try:
            return run_suite(args.config, baseline_path=args.baseline,
                             cache=args.cache, workers=args.workers,
                             update_baseline=args.update_baseline)
        except (FGLError, OSError, ValueError) as exc:
            print(f"fgl suite: {exc}", file=sys.stderr)
            return 2
    try:
        record = run_job(_job_from_args(args))
    except FGLError as exc:
        print(f"fgl {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"fgl {args.command}: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(record) + "\n")
    fmt = getattr(args, "format", "json")
    if getattr(args, "report", None):
        fmt = args.report
    if fmt == "text":
        _print_text(record["outputs"], sys.stdout)
    else:
        print(canonical_json(record["outputs"]))
    return 0 if record_passed(record) else 2


if __name__ == "__main__":
    sys.exit(main())
