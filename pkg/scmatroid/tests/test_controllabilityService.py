import random

import pytest

from scmatroid.services.controllabilityService import (
    Certificate,
    CheckLimits,
    CheckMethod,
    Closure,
    ClosureKind,
    RowPartition,
    SystemDef,
    Verdict,
    VerdictStatus,
    audit_certificate,
    certificate_search,
    compose_parallel,
    composite_certificate_check,
    kalman_check,
    overall_status,
    pbh_check,
    run_checks,
    verify_certificate,
)
from scmatroid.services.errors import DimensionError, PartitionError, PencilError, ShapeMismatchError
from scmatroid.services.exactLinalg import SymMatrix
from scmatroid.services.symbolicCore import RationalFunction
from scmatroid.services.systemFileService import load_certificate
from scmatroid.services.vectorMatroid import Base, UnimodularBase
from scmatroid.tests.conftest import fixture_system

EXAMPLE1_BLOCKS = RowPartition.parse("1,2;3,4,5")
PENDULUM_BLOCKS = RowPartition.parse("1,2;3,4;5,6")


def _labels(verdict: Verdict):
    return [ub.labels for ub in verdict.evidence.bases]


def _certificate(partition: RowPartition, *labels):
    return Certificate(partition, tuple(UnimodularBase(Base(tuple(b)), None) for b in labels))


# ==================== EXACT TESTS ====================

def test_pbh_and_kalman_on_controllable_fixtures(sigma1, sigma2, example1, pendulum, bridge):
    for sys in (sigma1, sigma2, example1, pendulum, bridge):
        assert pbh_check(sys).status is VerdictStatus.CONTROLLABLE, sys.name
        assert kalman_check(sys).status is VerdictStatus.CONTROLLABLE, sys.name


def test_pbh_reports_the_common_factor():
    sys = fixture_system("uncontrollable")
    verdict = pbh_check(sys)
    assert verdict.status is VerdictStatus.NOT_CONTROLLABLE
    z1, s = sys.space.var("z1"), sys.space.s()
    assert verdict.evidence in (s - z1, z1 - s)
    assert kalman_check(sys).status is VerdictStatus.NOT_CONTROLLABLE


def test_zero_input_system():
    sys = fixture_system("zero_input")
    verdict = pbh_check(sys)
    assert verdict.status is VerdictStatus.NOT_CONTROLLABLE
    z1, s = sys.space.var("z1"), sys.space.s()
    assert verdict.evidence in (s ** 2 - z1, z1 - s ** 2)
    assert kalman_check(sys).status is VerdictStatus.NOT_CONTROLLABLE
    # the only disjoint family does not close
    assert certificate_search(sys).status is VerdictStatus.INCONCLUSIVE


def test_system_without_inputs(space):
    sys = SystemDef(space, SymMatrix(space, [[0, 1], [1, 0]]), SymMatrix(space, [[], []], cols=0))
    assert kalman_check(sys).status is VerdictStatus.NOT_CONTROLLABLE
    assert pbh_check(sys).status is VerdictStatus.NOT_CONTROLLABLE


def test_pbh_column_limit(example1):
    verdict = pbh_check(example1, CheckLimits(max_columns=6))
    assert verdict.status is VerdictStatus.INCONCLUSIVE
    assert "max_columns" in verdict.detail


def test_seeded_rank_gives_the_same_verdicts(example1, pendulum):
    for sys in (example1, pendulum):
        plain = run_checks(sys, [CheckMethod.PBH, CheckMethod.KALMAN, CheckMethod.MATROID])
        seeded = run_checks(sys, [CheckMethod.PBH, CheckMethod.KALMAN, CheckMethod.MATROID],
                            limits=CheckLimits(seed=11))
        assert [v.status for v in plain] == [v.status for v in seeded]


# ==================== CERTIFICATES ====================

def test_example1_certificate(example1):
    verdict = certificate_search(example1, EXAMPLE1_BLOCKS)
    assert verdict.status is VerdictStatus.CERTIFIED
    assert verdict.method is CheckMethod.MATROID
    cert = verdict.evidence
    assert _labels(verdict) == [("a2", "a6"), ("a3", "a4", "a7")]
    assert cert.totals == (2, 3)
    assert cert.closure.kind is ClosureKind.MINOR_GCD
    assert verdict.detail.endswith("= 5, closed by minor-gcd")
    assert cert.closure.value.is_unit_in_s()
    z3 = example1.space.var("z3")
    assert cert.bases[0].witness == -z3
    assert cert.bases[1].witness == 1


def test_example1_default_partition(example1):
    verdict = certificate_search(example1)
    assert verdict.status is VerdictStatus.CERTIFIED
    assert verdict.evidence.partition == RowPartition.singletons(5)
    assert verdict.evidence.totals == (1, 1, 1, 1, 1)
    assert audit_certificate(example1, verdict.evidence).valid


def test_pendulum_certificate(pendulum):
    verdict = certificate_search(pendulum, PENDULUM_BLOCKS)
    assert verdict.status is VerdictStatus.CERTIFIED
    assert _labels(verdict) == [("a4", "a5"), ("a6", "a7"), ("a2", "a3")]
    assert verdict.evidence.closure.kind is ClosureKind.MINOR_GCD
    assert verdict.detail.endswith("closed by minor-gcd")


def test_pendulum_certificate_file_verifies(pendulum, fixtures_dir):
    cert = load_certificate(fixtures_dir / "pendulum_certificate.json", pendulum)
    audit = audit_certificate(pendulum, cert)
    assert audit.valid, audit.failures
    assert audit.closure.kind is ClosureKind.MINOR_GCD
    assert all(w.is_s_free() for w in audit.witnesses)


def test_printed_example1_certificate_fails(example1, fixtures_dir):
    cert = load_certificate(fixtures_dir / "example1_printed_certificate.json", example1)
    audit = audit_certificate(example1, cert)
    assert not audit.valid
    s, z3 = example1.space.s(), example1.space.var("z3")
    assert audit.witnesses[0] == -z3
    assert audit.witnesses[1] == -s ** 2 + s
    assert any(f.startswith("block 2") for f in audit.failures)
    assert audit.closure is None


def test_search_certificates_survive_the_audit(example1, pendulum):
    for sys, partition in ((example1, EXAMPLE1_BLOCKS), (pendulum, PENDULUM_BLOCKS)):
        cert = certificate_search(sys, partition).evidence
        audit = audit_certificate(sys, cert)
        assert audit.valid
        assert audit.closure.kind is cert.closure.kind
        assert audit.witnesses == [ub.witness for ub in cert.bases]
        assert verify_certificate(sys, cert)


def test_overlapping_bases_are_rejected(example1):
    cert = _certificate(EXAMPLE1_BLOCKS, ["a2", "a6"], ["a3", "a6", "a7"])
    audit = audit_certificate(example1, cert)
    assert not audit.valid
    assert any(f.startswith("disjointness") for f in audit.failures)


def test_wrong_claimed_witness_is_rejected(example1):
    z1 = example1.space.var("z1")
    cert = Certificate(EXAMPLE1_BLOCKS, (
        UnimodularBase(Base(("a2", "a6")), RationalFunction(z1)),
        UnimodularBase(Base(("a3", "a4", "a7")), None),
    ))
    audit = audit_certificate(example1, cert)
    assert not audit.valid
    assert any("claimed witness" in f for f in audit.failures)


def test_wrong_claimed_closure_is_rejected(example1):
    found = certificate_search(example1, EXAMPLE1_BLOCKS).evidence
    bogus = Closure(found.closure.kind, RationalFunction.coerce(example1.space, 17))
    audit = audit_certificate(example1, Certificate(found.partition, found.bases, bogus))
    assert not audit.valid
    assert any(f.startswith("closure") for f in audit.failures)


def test_claimed_union_minor_must_be_a_unit(example1):
    found = certificate_search(example1, EXAMPLE1_BLOCKS).evidence
    claimed = Closure(ClosureKind.UNION_MINOR, found.closure.value)
    audit = audit_certificate(example1, Certificate(found.partition, found.bases, claimed))
    assert not audit.valid
    assert audit.failures[0].startswith("closure: claimed union minor")


def test_base_size_must_match_block(example1):
    cert = _certificate(EXAMPLE1_BLOCKS, ["a2"], ["a3", "a4", "a7"])
    audit = audit_certificate(example1, cert)
    assert not audit.valid
    assert audit.witnesses[0] is None


def test_audit_shape_errors(example1):
    with pytest.raises(ShapeMismatchError):
        audit_certificate(example1, _certificate(EXAMPLE1_BLOCKS, ["a2", "a6"]))
    with pytest.raises(ShapeMismatchError):
        audit_certificate(example1, _certificate(EXAMPLE1_BLOCKS, ["a2", "a9"], ["a3", "a4", "a7"]))
    with pytest.raises(ShapeMismatchError):
        audit_certificate(example1, _certificate(RowPartition.parse("1,2;3,4"), ["a2", "a6"], ["a3", "a4"]))


def test_search_closure_limit(example1):
    verdict = certificate_search(example1, EXAMPLE1_BLOCKS, CheckLimits(max_columns=6))
    assert verdict.status is VerdictStatus.INCONCLUSIVE
    assert "max_columns" in verdict.detail


def test_block_rank_sum_must_be_n():
    sys = fixture_system("uncontrollable")
    verdict = certificate_search(sys, RowPartition.parse("1,2"))
    assert verdict.status is VerdictStatus.INCONCLUSIVE


# ==================== COMPOSITION ====================

def test_compose_parallel_matches_the_composite(sigma1, sigma2, example1):
    composite = compose_parallel([sigma1, sigma2])
    assert composite.name == "sigma1 || sigma2"
    assert (composite.n, composite.m) == (5, 2)
    assert composite.A == example1.A and composite.B == example1.B
    assert compose_parallel([sigma1]) is sigma1


def test_compose_parallel_rejects_mismatched_inputs(sigma1):
    with pytest.raises(DimensionError):
        compose_parallel([sigma1, fixture_system("sigma2_wide_input")])
    with pytest.raises(DimensionError):
        compose_parallel([])


def test_composite_certificate(sigma1, sigma2):
    verdict = composite_certificate_check([sigma1, sigma2])
    assert verdict.status is VerdictStatus.CERTIFIED
    assert verdict.method is CheckMethod.COMPOSITE
    assert verdict.evidence.partition == EXAMPLE1_BLOCKS


def test_repeated_mode_is_not_certified():
    sub = fixture_system("repeated_mode")
    composite = compose_parallel([sub, sub])
    assert pbh_check(sub).status is VerdictStatus.CONTROLLABLE
    assert pbh_check(composite).status is VerdictStatus.NOT_CONTROLLABLE
    verdict = composite_certificate_check([sub, sub])
    assert verdict.status is VerdictStatus.INCONCLUSIVE
    assert "disjoint" in verdict.detail


def test_disjoint_bases_without_closure_are_not_certified():
    sub = fixture_system("shared_inputs")
    composite = compose_parallel([sub, sub])
    assert pbh_check(composite).status is VerdictStatus.NOT_CONTROLLABLE
    verdict = composite_certificate_check([sub, sub])
    assert verdict.status is VerdictStatus.INCONCLUSIVE
    assert "close" in verdict.detail
    cert = _certificate(RowPartition.singletons(2), ["a3"], ["a4"])
    audit = audit_certificate(composite, cert)
    assert not audit.valid
    assert audit.failures[0].startswith("closure")


def test_composite_with_uncontrollable_part():
    sub = fixture_system("uncontrollable")
    wide = compose_parallel([sub, sub])
    verdict = composite_certificate_check([sub, sub])
    assert verdict.status is VerdictStatus.NOT_CONTROLLABLE
    assert verdict.method is CheckMethod.PBH
    assert pbh_check(wide).status is VerdictStatus.NOT_CONTROLLABLE


# ==================== RANDOM SYSTEMS ====================

def _random_system(space, rng: random.Random) -> SystemDef:
    z1, z2 = space.var("z1"), space.var("z2")
    pool = [0, 0, 0, 1, -1, 2, z1, z2, z1 + z2, z1 * z2]
    n, m = rng.choice([(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2)])
    A = SymMatrix(space, [[rng.choice(pool) for _ in range(n)] for _ in range(n)])
    B = SymMatrix(space, [[rng.choice(pool) for _ in range(m)] for _ in range(n)])
    return SystemDef(space, A, B, "random")


def test_random_systems_certificates_are_sound(space):
    rng = random.Random(4242)
    certified = 0
    for _ in range(200):
        sys = _random_system(space, rng)
        pbh = pbh_check(sys)
        assert pbh.status is kalman_check(sys).status
        verdict = certificate_search(sys)
        assert verdict.status in (VerdictStatus.CERTIFIED, VerdictStatus.INCONCLUSIVE)
        if verdict.status is VerdictStatus.CERTIFIED:
            certified += 1
            assert pbh.status is VerdictStatus.CONTROLLABLE
            assert audit_certificate(sys, verdict.evidence).valid
    assert certified > 0


# ==================== INPUTS AND VERDICTS ====================

def test_system_def_validation(space):
    s = space.s()
    with pytest.raises(PencilError):
        SystemDef(space, SymMatrix(space, [[s]]), SymMatrix(space, [[1]]))
    with pytest.raises(DimensionError):
        SystemDef(space, SymMatrix(space, [[1, 0]]), SymMatrix(space, [[1]]))
    with pytest.raises(DimensionError):
        SystemDef(space, SymMatrix(space, [[1]]), SymMatrix(space, [[1], [0]]))


def test_row_partition_parse_and_validate():
    assert RowPartition.parse("1,2;3,4,5").blocks == ((1, 2), (3, 4, 5))
    assert str(RowPartition.parse(" 1, 2 ; 3 ")) == "1,2;3"
    assert RowPartition.from_sizes([2, 3]) == EXAMPLE1_BLOCKS
    for text in ("1,2;", "1,x"):
        with pytest.raises(PartitionError):
            RowPartition.parse(text)
    with pytest.raises(PartitionError):
        RowPartition.parse("1,2;2,3").validate(3)
    with pytest.raises(PartitionError):
        RowPartition.parse("1;3").validate(3)
    with pytest.raises(PartitionError):
        RowPartition.parse("1;2;4").validate(3)


def test_composite_method_is_not_a_single_system_check(example1):
    with pytest.raises(ValueError):
        run_checks(example1, [CheckMethod.COMPOSITE])


def test_overall_status():
    def verdict(status):
        return Verdict(status, CheckMethod.PBH)

    ok, no = VerdictStatus.CONTROLLABLE, VerdictStatus.NOT_CONTROLLABLE
    cert, unknown = VerdictStatus.CERTIFIED, VerdictStatus.INCONCLUSIVE
    assert overall_status([verdict(ok), verdict(cert)]) is ok
    assert overall_status([verdict(unknown), verdict(no), verdict(ok)]) is no
    assert overall_status([verdict(unknown), verdict(cert)]) is cert
    assert overall_status([verdict(unknown)]) is unknown
    assert overall_status([]) is unknown
    assert verdict(cert).positive and not verdict(unknown).positive


def _scale_b_row(sys: SystemDef, row: int, factor) -> SystemDef:
    return SystemDef(sys.space, sys.A, sys.B.scale_row(row, factor), sys.name)


def test_scaling_a_row_of_b_keeps_the_verdicts(sigma1):
    methods = [CheckMethod.PBH, CheckMethod.KALMAN, CheckMethod.MATROID]
    uncontrollable = fixture_system("uncontrollable")
    for sys, row in ((sigma1, 1), (uncontrollable, 0)):
        scaled = _scale_b_row(sys, row, sys.space.var("z1"))
        assert ([v.status for v in run_checks(scaled, methods)]
                == [v.status for v in run_checks(sys, methods)])
