"""Batch verification runner.

Each check is an independent job with a stable id and an anchor naming the
identity it exercises.  Jobs run on a thread pool; the report is assembled
by one writer and sorted by check id, so its content does not depend on
scheduling.
"""
from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

from gmpy2 import mpq

from . import __version__, structural
from .cosets import prime_factors
from .formal import (
    FormalSum,
    PeriodVector,
    SeedFunction,
    jplus_witness_search,
    lewis_check_function,
    lewis_residual,
)
from .gl2 import DomainError, T
from .hecke import (
    induce_old_vector,
    lift_period,
    t_tilde_apply,
    t_tilde_relation,
    to_coset_indexing,
    verify_algebra,
)
from .stern import psi_vector

THREADS_ENV = "HECKE_LAB_THREADS"

STATUSES = ("pass", "fail", "inconclusive")


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


@dataclass
class SuiteConfig:
    n_max: int = 10
    m_max: int = 6
    p_set: tuple[int, ...] = (2, 3, 5)
    e_max: int = 2
    depth_cap: int = 10_000
    sample_point_count: int = 20
    mode: str = "exact"
    betas: tuple = (1, 2)
    output_format: str = "text"
    threads: int = field(default_factory=default_threads)
    rng_seed: int = 0
    fail_fast: bool = False
    # test hook: perturbs one orbit sum so the three-term checks must fail
    corrupt_psi: bool = False

    def validate(self) -> SuiteConfig:
        for name in ("n_max", "m_max", "e_max", "depth_cap", "sample_point_count", "threads"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be at least 1")
        if not self.p_set or any(prime_factors(p) != [p] for p in self.p_set):
            raise DomainError(f"p_set must be a nonempty list of primes, got {self.p_set}")
        if self.mode not in ("exact", "float"):
            raise DomainError(f"mode must be exact or float, got {self.mode!r}")
        if self.output_format not in ("text", "json"):
            raise DomainError(f"output format must be text or json, got {self.output_format!r}")
        if not self.betas:
            raise DomainError("betas must be nonempty")
        if self.mode == "exact" and any(not isinstance(b, int) or b < 1 for b in self.betas):
            raise DomainError("exact mode needs positive integer betas")
        return self

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = [str(x) for x in v] if isinstance(v, (tuple, list)) else str(v)
        return out


@dataclass
class CheckRecord:
    check_id: str
    anchor: str
    params: dict
    status: str
    payload: dict
    wall_time: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "checkId": self.check_id,
            "anchor": self.anchor,
            "params": {k: str(v) for k, v in sorted(self.params.items())},
            "status": self.status,
            "payload": self.payload,
        }
        if timings:
            out["wallTime"] = f"{self.wall_time:.3f}"
        return out


@dataclass
class VerificationReport:
    config: SuiteConfig
    records: list[CheckRecord]

    @property
    def status(self) -> str:
        return "fail" if any(r.status == "fail" for r in self.records) else "pass"

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "pass" else 1

    def counts(self) -> dict:
        return {s: sum(r.status == s for r in self.records) for s in STATUSES}

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "toolVersion": __version__,
            "rngSeed": str(self.config.rng_seed),
            "config": self.config.to_dict(),
            "status": self.status,
            "counts": {k: str(v) for k, v in self.counts().items()},
            "checks": [r.to_dict(timings) for r in self.records],
        }

    def to_text(self, timings: bool = False) -> str:
        lines = []
        for r in self.records:
            extra = f"  {r.wall_time:.2f}s" if timings else ""
            lines.append(f"{r.status:<12} {r.check_id:<40} [{r.anchor}]{extra}")
        c = self.counts()
        lines.append(
            f"overall: {self.status} ({c['pass']} pass, {c['fail']} fail, {c['inconclusive']} inconclusive)"
        )
        return "\n".join(lines)


@dataclass
class Job:
    check_id: str
    anchor: str
    params: dict
    run: Callable[[], tuple[str, dict]]


def _structural_job(check_id: str, anchor: str, fn, **params) -> Job:
    def run():
        result = fn(**params)
        payload = {"cases": str(result.cases), "failures": [repr(f) for f in result.failures]}
        return ("pass" if result.passed else "fail"), payload

    return Job(check_id, anchor, params, run)


def _seeds(config: SuiteConfig) -> list[SeedFunction]:
    return [SeedFunction.inverse_z()] + [SeedFunction.eisenstein(b) for b in config.betas]


def suite_psi(n: int, config: SuiteConfig) -> tuple[FormalSum, ...]:
    psi = psi_vector(n)
    if config.corrupt_psi:
        psi = (psi[0] + FormalSum.of(T),) + psi[1:]
    return psi


def _witness_job(n: int, config: SuiteConfig) -> Job:
    def run():
        residual = lewis_residual(n, suite_psi(n, config))
        missing = []
        for i, r in enumerate(residual):
            res = jplus_witness_search(r, config.depth_cap)
            if not res.found:
                missing.append({"index": str(i), "reason": res.reason})
        return ("inconclusive" if missing else "pass"), {"missing": missing}

    return Job(f"lewis.witness.n{n:03d}", "theorem 1", {"n": n}, run)


def _lewis_function_job(n: int, config: SuiteConfig) -> Job:
    def run():
        psi = suite_psi(n, config)
        failures = []
        for seed in _seeds(config):
            report = lewis_check_function(n, PeriodVector(n, seed, psi), config.mode)
            for c in report.components:
                if c.status != "pass":
                    failures.append({"seed": seed.kind, "beta": str(seed.beta), "index": str(c.index)})
        return ("fail" if failures else "pass"), {"failures": failures}

    return Job(f"lewis.function.n{n:03d}", "three-term 3", {"n": n, "mode": config.mode}, run)


def _closure_job(n: int, config: SuiteConfig) -> Job:
    def run():
        failures = []
        for seed in _seeds(config):
            v = PeriodVector(n, seed, suite_psi(n, config))
            for m in range(2, config.m_max + 1):
                if not lewis_check_function(n, t_tilde_apply(n, m, v), config.mode).passed:
                    failures.append({"seed": seed.kind, "beta": str(seed.beta), "m": str(m)})
        return ("fail" if failures else "pass"), {"failures": failures}

    return Job(f"ttilde.closure.n{n:03d}", "theorem 3", {"n": n, "mMax": config.m_max}, run)


def _recursion_job(n: int, p: int, config: SuiteConfig) -> Job:
    def run():
        failures = []
        # exact evaluation only, so complex weights of float mode are skipped
        for seed in [s for s in _seeds(config) if isinstance(s.beta, int)]:
            v = PeriodVector(n, seed, psi_vector(n))
            for e in range(1, config.e_max + 1):
                rep = t_tilde_relation(v, p, e)
                if not rep.passed:
                    failures.append(rep.to_dict() | {"seed": seed.kind, "beta": str(seed.beta)})
        return ("fail" if failures else "pass"), {"failures": failures}

    return Job(f"ttilde.recursion.n{n:03d}.p{p}", "Hecke operator 1", {"n": n, "p": p, "eMax": config.e_max}, run)


def _route_job(n: int, m: int, config: SuiteConfig) -> Job:
    def run():
        seed = SeedFunction.inverse_z()
        v = PeriodVector(n, seed, psi_vector(n))
        induced = induce_old_vector(n, m, v.with_weights(to_coset_indexing(n, v.weights)))
        lifted = lift_period(n, m, v)
        expected = to_coset_indexing(n * m, lifted.weights)
        points = [mpq(2 * k + 1, k + 2) for k in range(config.sample_point_count)]
        bad = []
        for z in points:
            if induced.evaluate(z) != induced.with_weights(expected).evaluate(z):
                bad.append(str(z))
        return ("fail" if bad else "pass"), {"points": str(len(points)), "failPoints": bad}

    return Job(f"route.n{n:03d}.m{m:03d}", "TH", {"n": n, "m": m}, run)


def _algebra_jobs(config: SuiteConfig) -> list[Job]:
    jobs = []
    rng = random.Random(config.rng_seed)

    def relation_job(check_id, family, n, **params):
        def run():
            rep = verify_algebra(n, family, **params)
            return ("pass" if rep.passed else "fail"), rep.to_dict()

        return Job(check_id, "2 main theorem", {"n": n, **params}, run)

    for n in range(1, config.n_max + 1):
        for p in config.p_set:
            family = "divides" if n % p == 0 else "coprime"
            for e in range(1, config.e_max + 1):
                if family == "divides" and p ** (e + 1) * n > 200:
                    continue
                jobs.append(relation_job(f"hecke.{family}.n{n:03d}.p{p}.e{e}", family, n, p=p, e=e))
    for n in range(1, config.n_max + 1):
        for m in range(2, config.m_max + 1):
            for m2 in range(m + 1, config.m_max + 1):
                if math.gcd(m, m2) == 1 and m * m2 * n <= 200:
                    jobs.append(relation_job(f"hecke.mult.n{n:03d}.m{m}.{m2}", "mult", n, m=m, m2=m2))
    for k in range(20):
        n = rng.randint(1, config.n_max)
        a, b = rng.randint(2, config.m_max), rng.randint(2, config.m_max)
        jobs.append(relation_job(f"hecke.commute.{k:02d}", "commute", n, a=a, b=b))
    return jobs


def build_jobs(config: SuiteConfig) -> list[Job]:
    n_max = config.n_max
    jobs = [
        _structural_job("index.formula", "B5c", structural.check_index_formula, n_max=max(n_max, 60)),
        _structural_job("index.classes", "map Pn In", structural.check_class_bijection, n_max=max(n_max, 60)),
        _structural_job("index.h_bijective", "def of hn", structural.check_h_bijective, n_max=max(n_max, 60)),
        _structural_job("stern.psi_total", "matrix psi(m) 2", structural.check_psi_total),
        _structural_job("stern.farey_k", "mr K", structural.check_farey_k_coherence, n_max=max(n_max, 60)),
        _structural_job("hecke.xstar", "lemma e>2", structural.check_x_star_products, p_set=config.p_set, e_max=4),
        _structural_job("lemma.h_sigma", "h sigma", structural.check_h_sigma, limit=60),
        _structural_job("lemma.uniqueness", "uniqueness", structural.check_factorization_uniqueness, limit=60),
        _structural_job("lemma.common_divisor", "uniqueness 1", structural.check_common_divisor, limit=36),
        _structural_job("lemma.lift_index", "lemma 1", structural.check_lift_tables, limit=60),
        _structural_job("lemma.fr", "lemma Fr", structural.check_lemma_fr, n_max=60),
        _structural_job("lemma.la", "lA", structural.check_lemma_la, limit=36),
        _structural_job("lemma.bnbm", "lemma2", structural.check_lemma_bnbm, limit=36),
        _structural_job("lemma.orbit_selection", "rhotilde", structural.check_orbit_selection, limit=36),
        _structural_job("lemma.rho_equivalence", "Hn", structural.check_rho_equivalence, seed=config.rng_seed),
        _structural_job("subgroup.b7", "B7", structural.check_b7, seed=config.rng_seed),
        _structural_job("subgroup.bar_images", "B3", structural.check_bar_images),
        _structural_job("subgroup.rep_systems", "2 system of representatives", structural.check_rep_systems),
        _structural_job(
            "subgroup.rep_independence",
            "2 def Hecke operators",
            structural.check_representative_independence,
            seed=config.rng_seed,
        ),
    ]
    for n in range(1, n_max + 1):
        jobs.append(_witness_job(n, config))
        jobs.append(_lewis_function_job(n, config))
    for n in range(1, min(n_max, 6) + 1):
        jobs.append(_closure_job(n, config))
    for n in range(1, min(n_max, 4) + 1):
        for p in config.p_set:
            if p <= 3:
                jobs.append(_recursion_job(n, p, config))
    for n, m in ((1, 2), (1, 3), (2, 2), (2, 3), (3, 2)):
        if n <= n_max:
            jobs.append(_route_job(n, m, config))
    jobs.extend(_algebra_jobs(config))
    return jobs


def _execute(job: Job) -> CheckRecord:
    start = time.perf_counter()
    try:
        status, payload = job.run()
    except Exception as exc:  # a crashing check is a failed check
        status, payload = "fail", {"error": f"{type(exc).__name__}: {exc}"}
    return CheckRecord(job.check_id, job.anchor, job.params, status, payload, time.perf_counter() - start)


def run_suite(config: SuiteConfig | None = None) -> VerificationReport:
    config = (config or SuiteConfig()).validate()
    jobs = build_jobs(config)
    ids = [j.check_id for j in jobs]
    if len(set(ids)) != len(ids):
        raise AssertionError("duplicate check ids")
    records: list[CheckRecord] = []
    if config.fail_fast:
        for job in sorted(jobs, key=lambda j: j.check_id):
            records.append(_execute(job))
            if records[-1].status == "fail":
                break
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(_execute, jobs))
    records.sort(key=lambda r: r.check_id)
    return VerificationReport(config, records)
