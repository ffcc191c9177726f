#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Job orchestration for the command line.

A command is planned into named jobs, each a thunk returning a JSON-ready
payload with a ``passed`` flag. Jobs run on a thread pool (size from the
configuration, capped by OPCALC_THREADS) and are written into the report
in plan order, so the report does not depend on completion order.
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Optional

from tqdm import tqdm

from opcalc.calculus import SUITES, ModuleCalculus, cyclic_side, extra_checks, identity_suite
from opcalc.complexes import CYCLIC, NEGATIVE, PERIODIC, UWindowComplex, sbi_maps, stability_check, validate_mixed
from opcalc.exact_linalg import FieldSpec
from opcalc.exceptions import (
    BNotExact,
    BracketNonzero,
    InputError,
    LiftNotFound,
    NoFrobeniusForm,
    NotACocycle,
    NotQuasiIso,
    OpcalcError,
    UntrustedDegree,
)
from opcalc.op_modules import (
    SimplicialChains,
    chains_module,
    dualize,
    operad_as_module,
    validate_cyclic_module,
    validate_opposite,
)
from opcalc.operads import (
    AlgebraSpec,
    cosimplicial,
    cyclic_structure_from_frobenius,
    end_operad,
    normalized,
    validate_cyclic,
    validate_operad,
    validate_operations,
)
from opcalc.report import Report, table_payload
from opcalc.structures import (
    OperadCartanCalculus,
    bv_structure,
    corollary_checks,
    csm_bracket,
    e3_bracket,
    gerstenhaber_algebra,
    negative_cyclic_homology_bracket,
    operad_cartan_data,
    regrade_for_theoremA,
    theoremA_bracket,
    transfer_structure,
    unit_cycle,
    verify_palladio,
)
from opcalc.verdicts import ValidationReport

logger = logging.getLogger("opcalc.runner")

COMMANDS = ("check-operad", "check-module", "identities", "homology", "bracket", "report-all")
SUITE_CHOICES = ("all",) + tuple(SUITES) + ("extra", "cyclic_side", "operad")
BRACKETS = ("gerstenhaber", "bv", "thmA", "csm", "e3", "negcyclic")
TRANSFERRED = ("thmA", "csm", "e3", "negcyclic")
HOMOLOGY_VARIANTS = (CYCLIC, NEGATIVE, PERIODIC)
SIDES = ("chains", "operad")
CHECK_FIELD = "F101"

# mathematical refusals: the requested structure does not exist on this input
REFUSALS = (BracketNonzero, NotQuasiIso, NotACocycle, BNotExact, LiftNotFound, UntrustedDegree)


@dataclass
class JobConfig:
    """One invocation: command, algebra files and options."""

    command: str
    inputs: List[str]
    field: Optional[str] = None
    n_max: int = 5
    suite: str = "all"
    which: str = "thmA"
    variant: str = CYCLIC
    side: str = "chains"
    stability: bool = False
    field_check: bool = False
    out: Optional[str] = None
    margin: int = 2
    stability_offset: int = 2
    include_tables: bool = True
    max_degree: Optional[int] = None
    default_field: str = "Q"

    def validate(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if not self.inputs:
            raise InputError("no algebra file given")
        if self.command != "report-all" and len(self.inputs) != 1:
            raise InputError(f"{self.command} takes exactly one algebra file")
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, int) or self.n_max < 2:
            raise InputError(f"n_max must be an integer >= 2, got {self.n_max!r}")
        if self.suite not in SUITE_CHOICES:
            raise InputError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITE_CHOICES)}")
        if self.which not in BRACKETS:
            raise InputError(f"unknown bracket {self.which!r}; choose from {', '.join(BRACKETS)}")
        if self.variant not in HOMOLOGY_VARIANTS:
            raise InputError(f"unknown variant {self.variant!r}")
        if self.side not in SIDES:
            raise InputError(f"unknown side {self.side!r}")
        if self.field is not None:
            FieldSpec.parse(self.field)
        FieldSpec.parse(self.default_field)
        if self.margin < 0 or self.stability_offset < 1:
            raise InputError("window margin must be >= 0 and stability offset >= 1")
        return self

    def options(self):
        return {
            "field": self.field,
            "n_max": self.n_max,
            "suite": self.suite,
            "which": self.which,
            "variant": self.variant,
            "side": self.side,
            "stability": self.stability,
            "field_check": self.field_check,
            "window_margin": self.margin,
        }

    def with_changes(self, **changes):
        data = dict(self.__dict__)
        data.update(changes)
        return JobConfig(**data)


class Instance:
    """Everything built from one algebra at one truncation bound, memoized."""

    def __init__(self, alg, n_max):
        self.alg = alg
        self.field = alg.field
        self.n_max = n_max
        self.operad = end_operad(alg, n_max)
        if alg.frobenius_form is not None:
            cyclic_structure_from_frobenius(alg, self.operad)
        self.nbar = normalized(self.operad)
        self._lock = threading.RLock()
        self._memo = {}

    @classmethod
    def load(cls, path, field=None, n_max=5, default_field="Q"):
        return cls(AlgebraSpec.load(path, field, default_field), n_max)

    @property
    def name(self):
        return self.alg.name

    @property
    def is_cyclic(self):
        return self.operad.is_cyclic

    def require_cyclic(self, what):
        if not self.is_cyclic:
            raise NoFrobeniusForm(f"{what} needs a Frobenius form on {self.name}")

    def memo(self, key, build):
        with self._lock:
            if key not in self._memo:
                self._memo[key] = build()
            return self._memo[key]

    @property
    def module(self):
        return self.memo("module", lambda: chains_module(self.alg, self.n_max, self.operad))

    @property
    def chains(self):
        return self.memo("chains", lambda: SimplicialChains(self.module))

    @property
    def chain_calc(self):
        return self.memo("chain_calc", lambda: ModuleCalculus(self.module, self.nbar, self.chains))

    @property
    def operad_calc(self):
        self.require_cyclic("the operad-side calculus")
        return self.memo("operad_calc", lambda: OperadCartanCalculus(self.operad, self.nbar))

    @property
    def mixed(self):
        return self.memo("mixed", lambda: self.chains.mixed_complex(0))

    def duality(self, side, margin):
        """(regrading, certificate, transfer) for ζ = [1] on chains or ζ = e on the operad."""
        def build():
            calc = self.chain_calc if side == "chains" else self.operad_calc
            reg = regrade_for_theoremA(calc, 0, margin)
            cert = verify_palladio(reg, unit_cycle(calc))
            return reg, cert, transfer_structure(reg, cert)
        return self.memo(("duality", side, margin), build)


# payload helpers

def _reports(reports):
    reports = list(reports)
    return {
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }


def _table(job, table):
    return {"passed": table.passed, "table": table_payload(table, job.include_tables, job.max_degree)}


def _refusal(error):
    payload = {
        "passed": False,
        "refused": True,
        "error": type(error).__name__,
        "message": str(error),
    }
    if error.degree is not None:
        payload["degree"] = error.degree
    witness = getattr(error, "witness", None)
    if witness is not None:
        payload["witness"] = witness
    return payload


# planning

def plan_check_operad(inst):
    op = inst.operad
    jobs = [
        ("operad axioms", lambda: _reports([validate_operad(op)])),
        ("cosimplicial", lambda: _reports([cosimplicial(op).validate()])),
        ("operations", lambda: _reports([validate_operations(op)])),
        ("normalized operad", lambda: _reports([inst.nbar.validate()])),
    ]
    if inst.is_cyclic:
        jobs += [
            ("cyclic operad", lambda: _reports([validate_cyclic(op)])),
            ("cyclic module", lambda: _reports([validate_cyclic_module(operad_as_module(op))])),
            ("normalized preserved", lambda: _reports([inst.operad_calc.preservation_checks()])),
        ]
    return jobs


def plan_check_module(inst):
    jobs = [
        ("opposite module", lambda: _reports([validate_opposite(inst.module)])),
        ("simplicial", lambda: _reports([inst.chains.validate()])),
        ("normalized chains", lambda: _reports([inst.chains.validate_normalized()])),
        ("mixed complex", lambda: _reports([validate_mixed(inst.mixed)])),
    ]
    if inst.is_cyclic:
        jobs.append(("dual module", lambda: _reports([validate_opposite(dualize(operad_as_module(inst.operad)))])))
    return jobs


def plan_identities(inst, suite):
    jobs = []
    names = list(SUITES) if suite == "all" else [suite] if suite in SUITES else []
    for name in names:
        jobs.append((f"chains {name}", lambda name=name: _reports([identity_suite(name, inst.chain_calc)])))
    if suite in ("all", "extra"):
        jobs.append(("chains extra", lambda: _reports(extra_checks(inst.chain_calc))))
    if suite in ("cyclic_side", "operad"):
        inst.require_cyclic(f"suite {suite}")
    if inst.is_cyclic and suite in ("all", "cyclic_side"):
        jobs.append(("cyclic side", lambda: _reports(cyclic_side(inst.operad, inst.nbar))))
    if inst.is_cyclic and suite in ("all", "operad"):
        jobs.append(("operad side", lambda: _reports(operad_cartan_data(inst.operad, inst.nbar)[1])))
    return jobs


def hochschild_payload(inst):
    chains = inst.chains
    dims = {str(n): chains.hochschild_homology(n).dim for n in range(0, chains.top)}
    mixed = inst.mixed
    return {
        "passed": validate_mixed(mixed).passed,
        "HH": dims,
        "mixed": mixed.describe(),
        "cohomology": mixed.homology_result().to_dict(),
    }


def variant_payload(inst, variant, margin):
    cc = UWindowComplex(inst.mixed, variant, margin)
    checks = [cc.validate(), cc.euler_check()]
    if variant in (CYCLIC, NEGATIVE):
        checks.append(sbi_maps(cc).checks)
    payload = _reports(checks)
    payload["homology"] = cc.homology_result().to_dict()
    return payload


def plan_homology(inst, variant, margin):
    return [
        ("hochschild", lambda: hochschild_payload(inst)),
        (f"homology {variant}", lambda: variant_payload(inst, variant, margin)),
    ]


def duality_payload(inst, side, margin):
    reg, cert, transfer = inst.duality(side, margin)
    commutes, poisson = corollary_checks(reg, cert)
    payload = {
        "passed": transfer.passed and commutes.passed and poisson.passed,
        "certificate": cert.to_dict(),
        "transfer": transfer.to_dict(),
        "corollaries": [commutes.to_dict(), poisson.to_dict()],
    }
    return payload


def bracket_payload(job, inst, which, side):
    margin = job.margin
    if which == "gerstenhaber":
        structure = gerstenhaber_algebra(inst.operad, inst.nbar)
        return {"passed": structure.passed, "structure": structure.to_dict(job.include_tables)}
    if which == "bv":
        inst.require_cyclic("the BV structure")
        structure = bv_structure(inst.operad, inst.nbar, margin)
        return {"passed": structure.passed, "structure": structure.to_dict(job.include_tables)}
    reg, cert, transfer = inst.duality(side, margin)
    if which == "thmA":
        return _table(job, theoremA_bracket(reg, cert, transfer=transfer))
    if which == "csm":
        return _table(job, csm_bracket(reg, cert, transfer))
    if which == "e3":
        csm = None
        try:
            csm = csm_bracket(reg, cert, transfer)
        except REFUSALS as e:
            logger.warning(f"e3 without the j-compatibility check: {e}")
        return _table(job, e3_bracket(reg, cert, transfer, csm))
    return _table(job, negative_cyclic_homology_bracket(reg, cert, transfer=transfer))


def bracket_job(job, inst, which, side):
    name = f"bracket {which}" if which in ("gerstenhaber", "bv") else f"bracket {which} {side}"
    return name, lambda: bracket_payload(job, inst, which, side)


def duality_job(job, inst, side):
    return f"duality {side}", lambda: duality_payload(inst, side, job.margin)


def plan_bracket(job, inst, which, side):
    if which in TRANSFERRED:
        return [duality_job(job, inst, side), bracket_job(job, inst, which, side)]
    return [bracket_job(job, inst, which, side)]


def plan_report_all(job, inst):
    jobs = plan_check_operad(inst) + plan_check_module(inst) + plan_identities(inst, "all")
    jobs.append(("hochschild", lambda: hochschild_payload(inst)))
    for variant in HOMOLOGY_VARIANTS:
        jobs.append((f"homology {variant}", lambda variant=variant: variant_payload(inst, variant, job.margin)))
    jobs.append(bracket_job(job, inst, "gerstenhaber", "chains"))
    sides = ["chains"]
    if inst.is_cyclic:
        jobs.append(bracket_job(job, inst, "bv", "operad"))
        sides.append("operad")
    for side in sides:
        jobs.append(duality_job(job, inst, side))
        jobs += [bracket_job(job, inst, which, side) for which in TRANSFERRED]
    return jobs


def plan(job, inst):
    if job.command == "check-operad":
        return plan_check_operad(inst)
    if job.command == "check-module":
        return plan_check_module(inst)
    if job.command == "identities":
        return plan_identities(inst, job.suite)
    if job.command == "homology":
        return plan_homology(inst, job.variant, job.margin)
    if job.command == "bracket":
        if job.side == "operad":
            inst.require_cyclic(f"bracket {job.which} on the operad side")
        return plan_bracket(job, inst, job.which, job.side)
    return plan_report_all(job, inst)


# execution

def _timed(thunk):
    start = time.time()
    try:
        payload = thunk()
    except InputError:
        raise
    except REFUSALS as e:
        logger.warning(f"refused: {type(e).__name__}: {e}")
        payload = _refusal(e)
    except OpcalcError as e:
        logger.error(f"{type(e).__name__}: {e}")
        payload = _refusal(e)
        payload["refused"] = False
    return payload, time.time() - start


def execute(jobs, threads=1, progress=True, desc="jobs"):
    """Run named jobs; results come back in plan order."""
    results = {}
    if threads <= 1:
        for name, thunk in tqdm(jobs, desc=desc, disable=not progress):
            results[name] = _timed(thunk)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            futures = {executor.submit(_timed, thunk): name for name, thunk in jobs}
            for future in tqdm(as_completed(futures), total=len(futures), desc=desc, disable=not progress):
                results[futures[future]] = future.result()
    return [(name, results[name]) for name, _ in jobs]


def run_sections(job, threads=1, progress=True):
    """All sections of a job, prefixed by the algebra name when several files are given."""
    sections = []
    for path in job.inputs:
        inst = Instance.load(path, job.field, job.n_max, job.default_field)
        jobs = plan(job, inst)
        logger.info(f"{job.command} on {inst.name} over {inst.field.label}: {len(jobs)} jobs")
        prefix = f"{inst.name}: " if len(job.inputs) > 1 else ""
        for name, outcome in execute(jobs, threads, progress, desc=f"{job.command} {inst.name}"):
            sections.append((prefix + name, outcome))
    return sections


def verdicts(sections):
    """name -> passed / refused flags of every section."""
    return {name: ("refused" if payload.get("refused") else bool(payload.get("passed")))
            for name, (payload, _) in sections}


def trusted_dims(sections):
    dims = {}
    for name, (payload, _) in sections:
        result = payload.get("homology")
        if not result:
            continue
        for entry in result["degrees"]:
            if entry["trusted"]:
                dims[(name, entry["degree"])] = entry["dim"]
    return dims


def compare_runs(subject, narrow, wide):
    """Changed verdicts and trusted dimensions between two runs."""
    report = ValidationReport(subject)
    a, b = verdicts(narrow), verdicts(wide)
    for name in a:
        if name in b:
            report.add("verdict", a[name] == b[name], section=name, verdicts=[a[name], b[name]])
    da, db = trusted_dims(narrow), trusted_dims(wide)
    for key in da:
        if key in db:
            report.add("trusted dim", da[key] == db[key], section=key[0], degree=key[1], dims=[da[key], db[key]])
    return report


def stability_payload(job, sections, threads, progress):
    wide_job = job.with_changes(n_max=job.n_max + job.stability_offset)
    wide = run_sections(wide_job, threads, progress)
    report = compare_runs(f"stability {job.n_max}->{wide_job.n_max}", sections, wide)
    payload = _reports([report])
    if job.command in ("homology", "report-all"):
        extra = []
        for path in job.inputs:
            def builder(n, path=path):
                return Instance.load(path, job.field, n, job.default_field).mixed
            for variant in ([job.variant] if job.command == "homology" else HOMOLOGY_VARIANTS):
                extra.append(stability_check(builder, variant, job.n_max, wide_job.n_max, job.margin))
        payload = _reports([report] + extra)
    return payload


def field_check_payload(job, sections, threads, progress):
    other = job.with_changes(field=CHECK_FIELD)
    mod_p = run_sections(other, threads, progress)
    return _reports([compare_runs(f"field check Q vs {CHECK_FIELD}", sections, mod_p)])


def exit_code_for(sections, refusals_fail):
    for _, (payload, _seconds) in sections:
        if payload.get("refused"):
            if refusals_fail:
                return 1
        elif not payload.get("passed", True):
            return 1
    return 0


def run(job, config, progress=True):
    """Execute a job; returns the report and the process exit code."""
    job.validate()
    threads = config.threads()
    report = Report(job.command, job.inputs, job.options(), config)
    sections = run_sections(job, threads, progress)
    for name, (payload, seconds) in sections:
        report.add_section(name, payload, seconds)
    extra = []
    if job.stability:
        start = time.time()
        extra.append(("stability", (stability_payload(job, sections, threads, progress), time.time() - start)))
    if job.field_check:
        start = time.time()
        extra.append(("field check", (field_check_payload(job, sections, threads, progress), time.time() - start)))
    for name, (payload, seconds) in extra:
        report.add_section(name, payload, seconds)
    exit_code = exit_code_for(sections + extra, refusals_fail=job.command != "report-all")
    summary = report.summarize(exit_code)
    logger.info(f"{job.command}: {summary['passed']} passed, {summary['failed']} failed, "
                f"{summary['refused']} refused")
    return report, exit_code
