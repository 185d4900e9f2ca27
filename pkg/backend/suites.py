"""Suite catalogue, case grids and the case runner."""

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from multiprocessing import Process, Queue, Value
from queue import Empty
from typing import Callable, Iterable

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, field_validator
from tqdm import tqdm

from backend.clifford_core import (
    GaussianRational,
    Multivector,
    reversion,
    witt_and_idempotent,
)
from backend.config import CaseStatus, Generator, KernelFamily, SpaceKind, VectorSource
from backend.conformal import (
    MobiusMap,
    cocycle_check,
    intertwining_check,
    intertwining_input,
    inversion_covariance_check,
    rational_rotors,
    rotation_covariance_check,
    vahlen_check,
)
from backend.errors import BudgetExceeded, EngineError, PoleError
from backend.identities import (
    CheckResult,
    check_B_action,
    check_B_commute,
    check_B_forms,
    check_c_alpha,
    check_classical_reduction,
    check_fundamental_solution,
    check_lemma_mixed_ops,
    check_lemma_radial_laplacian,
    check_rk_squared,
    check_telescoping,
    check_twistor_split,
)
from backend.numeric import numeric_delta_check, numeric_verdict
from backend.report import CaseRecord, Report
from backend.spaces import (
    almansi_split,
    build_basis,
    harmonic_dimension,
    hermitian_symmetric,
    random_combination,
    reproducing_kernel,
    reproducing_report,
    sample_function,
)
from backend.steinweiss import (
    dirac_duality_check,
    monogenic_witness,
    rs_projection_equivalence,
)

WORKER_POLL_SECONDS = 5.0


class SuiteConfig(BaseModel):
    """Everything that determines a run; serialized into the report."""

    suite: str
    m: list[int] = Field(default_factory=lambda: [3])
    k: list[int] = Field(default_factory=lambda: [0, 1])
    order: list[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    alpha: list[int] = Field(default_factory=list)
    beta: list[int] = Field(default_factory=list)
    s: list[int] = Field(default_factory=lambda: [1, 2])
    seed: int = 0
    budget: int = 1_000_000
    tolerance: float = 0.05
    resolution: int = 64

    @field_validator("suite")
    @classmethod
    def known_suite(cls, value: str) -> str:
        if value not in SUITES and value != "all":
            raise ValueError(f"Unknown suite {value!r}")
        return value

    @field_validator("m")
    @classmethod
    def valid_dimensions(cls, value: list[int]) -> list[int]:
        if any(m < 3 for m in value):
            raise ValueError(f"Dimensions must be >= 3, got {value}")
        return sorted(set(value))

    @field_validator("k", "order", "s")
    @classmethod
    def non_negative(cls, value: list[int]) -> list[int]:
        if any(v < 0 for v in value):
            raise ValueError(f"Grid values must be non-negative, got {value}")
        return sorted(set(value))

    @field_validator("alpha", "beta")
    @classmethod
    def deduplicated(cls, value: list[int]) -> list[int]:
        return sorted(set(value))


@dataclass(frozen=True)
class Suite:
    name: str
    cases: Callable[[SuiteConfig], Iterable[dict]]
    run: Callable[[dict, SuiteConfig], CheckResult | dict[str, CheckResult]]


def case_id(suite: str, params: dict) -> str:
    return f"{suite}/" + ",".join(f"{key}={value}" for key, value in params.items())


def combine(results: dict[str, CheckResult]) -> CheckResult:
    """One result for several named sub-checks; the first failure supplies the residual."""
    details = {}
    residual = "0"
    for name, result in results.items():
        details[name] = result.passed
        details.update({f"{name}.{key}": value for key, value in result.details.items()})
        if not result.passed and residual == "0":
            residual = f"{name}: {result.residual}"
    return CheckResult(all(r.passed for r in results.values()), residual, details)


# clifford


def _random_multivector(m: int, rng: np.random.Generator) -> Multivector:
    coeffs = rng.integers(-3, 4, size=(1 << m, 2))
    return Multivector(m, {blade: GaussianRational(int(a), int(b)) for blade, (a, b) in enumerate(coeffs)})


def run_clifford(params: dict, config: SuiteConfig) -> CheckResult:
    m = params["m"]
    results = {}
    one = Multivector.scalar(m)
    relations = True
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            ei, ej = Multivector.basis_vector(m, i), Multivector.basis_vector(m, j)
            expected = one.scale(-2) if i == j else Multivector(m)
            relations = relations and ei * ej + ej * ei == expected
    results["generators"] = CheckResult(relations)
    witt = witt_and_idempotent(m)
    idem = witt.idempotent
    results["idempotent"] = CheckResult(idem * idem == idem)
    results["witt_annihilates"] = CheckResult(all(not (f * idem) for f in witt.f))
    results["witt_nilpotent"] = CheckResult(all(not (f * f) for f in witt.f))
    results["witt_anticommutator"] = CheckResult(
        all(f * fd + fd * f == one for f, fd in zip(witt.f, witt.f_dagger))
    )
    rng = np.random.default_rng(config.seed)
    a, b, c = (_random_multivector(m, rng) for _ in range(3))
    results["associative"] = CheckResult((a * b) * c == a * (b * c))
    results["reversion"] = CheckResult(reversion(a * b) == reversion(b) * reversion(a))
    return combine(results)


# kernels


def kernel_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k, kind in product(config.m, config.k, SpaceKind):
        yield {"m": m, "k": k, "kind": kind.value}


def run_kernels(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, kind = params["m"], params["k"], SpaceKind(params["kind"])
    results = {}
    harmonic = build_basis(m, k, SpaceKind.HARMONIC_SCALAR)
    results["dimension"] = CheckResult(
        len(harmonic) == harmonic_dimension(m, k), details={"dimension": len(harmonic)}
    )
    conventions = reproducing_report(m, k, kind)
    results["reproducing"] = CheckResult(
        any(conventions.values()),
        details={"conventions": ",".join(name for name, ok in conventions.items() if ok)},
    )
    results["hermitian"] = CheckResult(hermitian_symmetric(reproducing_kernel(m, k, kind)))
    if k >= 1:
        h = random_combination(harmonic.elements, config.seed)
        p, q = almansi_split(h, k)
        reconstructs = p + q.vector_left_mul("u") == h
        monogenic = not p.dirac_left("u") and not q.dirac_left("u")
        results["almansi"] = CheckResult(reconstructs and monogenic)
    return combine(results)


# symbolic identities


def fundamental_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k, order in product(config.m, config.k, config.order):
        if order >= 1:
            yield {"m": m, "k": k, "order": order}


def run_fundamental(params: dict, config: SuiteConfig) -> CheckResult:
    return check_fundamental_solution(params["m"], params["k"], params["order"], config.seed, config.budget)


def _alphas(m: int, config: SuiteConfig) -> list[int]:
    alphas = config.alpha or sorted({4 - m, 6 - m, 0, 1})
    return [alpha for alpha in alphas if alpha > 2 - m]


def c_alpha_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k in product(config.m, config.k):
        for alpha in _alphas(m, config):
            yield {"m": m, "k": k, "alpha": alpha}


def run_c_alpha(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, alpha = params["m"], params["k"], params["alpha"]
    results = {
        source.value: check_c_alpha(m, k, alpha, source, seed=config.seed, budget=config.budget)
        for source in VectorSource
    }
    measured = {result.details["measured_constant"] for result in results.values()}
    results["sources_agree"] = CheckResult(len(measured) == 1, details={"measured": ",".join(sorted(measured))})
    return combine(results)


def lemma_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k in product(config.m, config.k):
        betas = config.beta or sorted({m - 2 * s for s in config.s if s >= 1})
        for beta in betas:
            if beta <= m - 2:
                yield {"m": m, "k": k, "beta": beta}


def run_lemmas(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, beta = params["m"], params["k"], params["beta"]
    results = {"laplacian": check_lemma_radial_laplacian(m, k, beta, config.seed)}
    results.update(check_lemma_mixed_ops(m, k, beta, config.seed))
    return combine(results)


def s_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k, s in product(config.m, config.k, config.s):
        if s >= 1:
            yield {"m": m, "k": k, "s": s}


def run_B(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, s = params["m"], params["k"], params["s"]
    return combine(
        {
            source.value: check_B_action(m, k, s, source, seed=config.seed, budget=config.budget)
            for source in VectorSource
        }
    )


def telescoping_cases(config: SuiteConfig) -> Iterable[dict]:
    js = sorted({(order + 1) // 2 for order in config.order if order % 2 and order >= 3})
    for m, k, j in product(config.m, config.k, js):
        yield {"m": m, "k": k, "j": j}


def run_telescoping(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, j = params["m"], params["k"], params["j"]
    return combine(
        {
            source.value: check_telescoping(m, k, j, source, seed=config.seed, budget=config.budget)
            for source in VectorSource
        }
    )


def run_b_forms(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, s = params["m"], params["k"], params["s"]
    return combine(
        {
            "forms": check_B_forms(m, k, s, seed=config.seed),
            "rk_squared": check_rk_squared(m, k, seed=config.seed),
            "twistor_split": check_twistor_split(m, k, seed=config.seed),
            "commute": check_B_commute(m, k, s, s + 1, seed=config.seed),
        }
    )


def classical_cases(config: SuiteConfig) -> Iterable[dict]:
    js = sorted({(order + 1) // 2 for order in config.order if order >= 1})
    for m, j in product(config.m, js):
        yield {"m": m, "j": j}


def run_classical(params: dict, config: SuiteConfig) -> CheckResult:
    return combine(check_classical_reduction(params["m"], params["j"], seed=config.seed))


# conformal


def covariance_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k in product(config.m, config.k):
        for order in config.order:
            if order >= 1:
                family = KernelFamily.BOSONIC if order % 2 == 0 else KernelFamily.FERMIONIC
                yield {"m": m, "k": k, "family": family.value, "value": order, "kernel": 2 - order % 2}
        for alpha in config.alpha or sorted({-m, 2 - m, 1}):
            for kernel in (1, 2):
                yield {"m": m, "k": k, "family": KernelFamily.GENERALIZED.value, "value": alpha, "kernel": kernel}


def run_covariance(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, value, kernel = params["m"], params["k"], params["value"], params["kernel"]
    family = KernelFamily(params["family"])
    results = {}
    for index, rotor in enumerate(rational_rotors(m)):
        results[f"rotation_{index}"] = rotation_covariance_check(m, k, value, rotor, family, kernel, config.seed)
    results["inversion"] = inversion_covariance_check(m, k, value, family, kernel, config.seed)
    return combine(results)


def _generators(m: int) -> dict[str, MobiusMap]:
    shift = (Fraction(1),) + (Fraction(0),) * (m - 1)
    return {
        "translation": MobiusMap.translation(m, shift),
        "dilation": MobiusMap.dilation(m, Fraction(4)),
        "rotation": MobiusMap.rotation(rational_rotors(m)[-1]),
        "inversion": MobiusMap.inversion(m),
    }


def intertwining_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k, t in product(config.m, config.k, config.order):
        if t >= 1:
            for generator in ("translation", "dilation", "rotation", "inversion"):
                yield {"m": m, "k": k, "t": t, "generator": generator}


def run_intertwining(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, t = params["m"], params["k"], params["t"]
    maps = _generators(m)
    phi = maps[params["generator"]]
    f = intertwining_input(m, k, t, config.seed)
    result = intertwining_check(m, k, t, phi, f, config.budget)
    result.details["vahlen"] = vahlen_check(phi)
    if phi.generator is not Generator.INVERSION:
        x = (Fraction(1), Fraction(2)) + (Fraction(2),) * (m - 2)
        result.details["cocycle"] = cocycle_check(t, phi, maps["dilation"], x)
    return result


def steinweiss_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k in product(config.m, config.k):
        yield {"m": m, "k": k}


def run_steinweiss(params: dict, config: SuiteConfig) -> CheckResult:
    m, k = params["m"], params["k"]
    results = {
        "duality_monogenic": dirac_duality_check(m, monogenic_witness(m)),
        "duality_generic": dirac_duality_check(m, sample_function(m, 0, SpaceKind.HARMONIC_SCALAR, config.seed)),
    }
    for i in range(10):
        f = sample_function(m, k, SpaceKind.MONOGENIC_CLIFFORD, config.seed + i)
        results[f"projection_{i}"] = rs_projection_equivalence(m, k, f)
    return combine(results)


# numeric


def numeric_cases(config: SuiteConfig) -> Iterable[dict]:
    for m, k, order in product(config.m, config.k, config.order):
        if m == 3 and order in (1, 2):
            yield {"m": m, "k": k, "order": order}


def run_numeric(params: dict, config: SuiteConfig) -> CheckResult:
    m, k, order = params["m"], params["k"], params["order"]
    ladder = [
        numeric_delta_check(m, k, order, resolution)
        for resolution in (max(config.resolution // 2, 4), config.resolution)
    ]
    return numeric_verdict(ladder, config.tolerance)


def grid_cases(config: SuiteConfig) -> Iterable[dict]:
    for m in config.m:
        yield {"m": m}


SUITES: dict[str, Suite] = {
    suite.name: suite
    for suite in (
        Suite("clifford", grid_cases, run_clifford),
        Suite("kernels", kernel_cases, run_kernels),
        Suite("fundamental_solutions", fundamental_cases, run_fundamental),
        Suite("prop_c_alpha", c_alpha_cases, run_c_alpha),
        Suite("lemmas", lemma_cases, run_lemmas),
        Suite("prop_B", s_cases, run_B),
        Suite("telescoping", telescoping_cases, run_telescoping),
        Suite("b_forms", s_cases, run_b_forms),
        Suite("classical_reduction", classical_cases, run_classical),
        Suite("covariance", covariance_cases, run_covariance),
        Suite("intertwining", intertwining_cases, run_intertwining),
        Suite("steinweiss", steinweiss_cases, run_steinweiss),
        Suite("numeric_delta", numeric_cases, run_numeric),
    )
}


def _plain(value):
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


def run_case(suite_name: str, params: dict, config: SuiteConfig) -> CaseRecord:
    """Run one case; engine errors become statuses and never escape."""
    suite = SUITES[suite_name]
    record = {"case_id": case_id(suite_name, params), "suite": suite_name, "params": params}
    logger.debug(f"Running {record['case_id']}")
    start = time.perf_counter()
    try:
        result = suite.run(params, config)
        if isinstance(result, dict):
            result = combine(result)
        record.update(
            status=CaseStatus.PASS if result.passed else CaseStatus.FAIL,
            residual=result.residual,
            details={key: _plain(value) for key, value in result.details.items()},
        )
    except PoleError as exc:
        logger.warning(f"{record['case_id']} skipped: {exc}")
        record.update(status=CaseStatus.SKIPPED_POLE, residual="", message=str(exc))
    except BudgetExceeded as exc:
        logger.warning(f"{record['case_id']} skipped: {exc}")
        record.update(status=CaseStatus.SKIPPED_BUDGET, residual="", message=str(exc))
    except EngineError as exc:
        logger.error(f"{record['case_id']} failed: {exc}")
        record.update(status=CaseStatus.FAIL, residual="", message=str(exc))
    except Exception as exc:
        logger.exception(f"{record['case_id']} raised {type(exc).__name__}")
        record.update(status=CaseStatus.FAIL, residual="", message=f"{type(exc).__name__}: {exc}")
    record["runtime_ms"] = (time.perf_counter() - start) * 1000.0
    if record["status"] is CaseStatus.FAIL:
        logger.warning(f"{record['case_id']} failed with residual {record['residual'] or record['message']}")
    return CaseRecord(**record)


def expand_cases(config: SuiteConfig) -> list[tuple[str, dict]]:
    names = list(SUITES) if config.suite == "all" else [config.suite]
    return [(name, params) for name in names for params in SUITES[name].cases(config)]


def _worker(cases: list[tuple[str, dict]], config: SuiteConfig, claimed: Value, results: Queue) -> None:
    """Claim cases through the shared counter until the list is exhausted."""
    while True:
        with claimed.get_lock():
            index = claimed.value
            claimed.value += 1
        if index >= len(cases):
            break
        suite_name, params = cases[index]
        results.put(run_case(suite_name, params, config).model_dump(mode="json"))


def _collect(cases: list[tuple[str, dict]], processes: list[Process], results: Queue) -> list[CaseRecord]:
    """Drain the result queue; once every worker has exited, unreported cases become failures."""
    records: list[CaseRecord] = []
    with tqdm(total=len(cases)) as progress:
        while len(records) < len(cases):
            try:
                records.append(CaseRecord(**results.get(timeout=WORKER_POLL_SECONDS)))
                progress.update(1)
                continue
            except Empty:
                pass
            if any(process.is_alive() for process in processes):
                continue
            try:
                while True:
                    records.append(CaseRecord(**results.get_nowait()))
                    progress.update(1)
            except Empty:
                pass
            codes = ",".join(str(process.exitcode) for process in processes)
            seen = {record.case_id for record in records}
            for suite_name, params in cases:
                lost = case_id(suite_name, params)
                if lost not in seen:
                    logger.error(f"Case {lost} lost: workers exited with codes {codes}")
                    records.append(
                        CaseRecord(
                            case_id=lost,
                            suite=suite_name,
                            params=params,
                            status=CaseStatus.FAIL,
                            residual="",
                            message=f"worker exited with codes {codes} before reporting",
                        )
                    )
                    progress.update(1)
    return records


def run_suite(config: SuiteConfig, jobs: int = 1) -> Report:
    cases = expand_cases(config)
    logger.info(f"Suite {config.suite}: {len(cases)} cases on {jobs} worker(s)")
    records: list[CaseRecord] = []
    if jobs <= 1 or len(cases) <= 1:
        for suite_name, params in tqdm(cases, total=len(cases)):
            records.append(run_case(suite_name, params, config))
    else:
        claimed = Value("i", 0)
        results: Queue = Queue()
        processes = [
            Process(target=_worker, args=(cases, config, claimed, results))
            for _ in range(min(jobs, len(cases)))
        ]
        for process in processes:
            process.start()
        records = _collect(cases, processes, results)
        for process in processes:
            process.join()
    report = Report(
        config=config.model_dump(mode="json"),
        cases=sorted(records, key=lambda record: record.case_id),
    )
    logger.info(f"Suite {config.suite} finished: {report.summary}")
    return report
