import math

import numpy as np
import pytest

from src.domain.errors import ConfigError, EmptyState, WrongStageCount
from src.domain.gaussian import inner_product
from src.domain.sgevolve import (Axis, BranchState, Particle, Regime, SGStage,
                                 classify_regime, derived_kick, evolve,
                                 initial_state, overlap_I, post_select,
                                 reduced_density_matrix, run_stages)
from src.domain.spin import (DOWN_X, SIGMA_X, SIGMA_Z, UP_X, UP_Z, bloch_state,
                             orthogonal, postselect_prob)


def x_stage(b, tau):
    return SGStage(axis=Axis.X, gradient=b, transit_time=tau)


def test_particle_validation():
    with pytest.raises(ValueError):
        Particle(mass=-1.0, magnetic_moment=1.0)
    assert Particle.neutron().name == "neutron"


def test_stage_from_cgs():
    stage = SGStage.from_cgs(Axis.X, 100.0, 1.4e-6, field_length_cm=5.0)
    assert stage.gradient == pytest.approx(1.0)
    assert stage.gradient_gauss_per_cm == pytest.approx(100.0)
    assert stage.field_length == pytest.approx(0.05)
    with pytest.raises(ValueError):
        SGStage(axis=Axis.X, gradient=1.0, transit_time=-1.0)


def test_axis_parse():
    assert Axis.parse("X") is Axis.X
    assert Axis.X.operator is SIGMA_X and Axis.Z.operator is SIGMA_Z
    with pytest.raises(ConfigError):
        Axis.parse("y")


def test_derived_kick(unit_particle):
    kick = derived_kick(x_stage(2.0, 3.0), unit_particle)
    assert kick.momentum_kick == pytest.approx(6.0)
    assert kick.center_shift == pytest.approx(9.0)
    assert kick.const_phase == pytest.approx(36.0 * 3.0 / 6.0)


def test_phase_grows_with_the_cube_of_transit_time(unit_particle):
    taus = np.array([0.25, 0.5, 1.0, 2.0, 4.0, 8.0])
    phases = np.array([derived_kick(x_stage(2.0, tau), unit_particle).const_phase
                       for tau in taus])
    assert phases / taus ** 3 == pytest.approx(np.full(taus.size, 4.0 / 6.0))
    slope = np.polyfit(np.log(taus), np.log(phases), 1)[0]
    assert slope == pytest.approx(3.0)


def test_fig2a_caption_kinematics(neutron):
    stage = SGStage.from_cgs(Axis.X, 100.0, 1.4e-6)
    kick = derived_kick(stage, neutron)
    assert kick.momentum_kick * 1e-2 / neutron.hbar == pytest.approx(1.2827, rel=1e-3)
    assert overlap_I(stage, neutron, 1e-2) == pytest.approx(0.0372, rel=1e-2)


def test_initial_state_is_normalized():
    state = initial_state(bloch_state(1.1, 0.3), 0.5)
    assert state.stages_applied == 0
    assert len(state.branches) == 2
    assert state.squared_norm() == pytest.approx(1.0)
    assert len(initial_state(UP_Z, 0.5).branches) == 1
    with pytest.raises(ValueError):
        initial_state(UP_Z, 0.0)


def test_single_stage_branches(unit_particle):
    state = evolve(initial_state(UP_Z, 1.0), x_stage(0.5, 1.0), unit_particle)
    assert state.labels == [("+x",), ("-x",)]
    plus, minus = state.branches
    assert plus.packets[Axis.X].x0 == pytest.approx(0.25)
    assert minus.packets[Axis.X].x0 == pytest.approx(-0.25)
    assert plus.packets[Axis.X].k0 == pytest.approx(0.5)
    assert plus.packets[Axis.Z] == minus.packets[Axis.Z]


def test_eigenstate_input_keeps_one_branch(unit_particle):
    state = evolve(initial_state(UP_X, 1.0), x_stage(0.5, 1.0), unit_particle)
    assert state.labels == [("+x",)]
    assert abs(state.branches[0].weight) == pytest.approx(1.0)


@pytest.mark.parametrize("I,regime", [
    (0.005, Regime.STRONG),
    (0.01, Regime.SEMIWEAK),
    (0.5, Regime.SEMIWEAK),
    (0.99, Regime.SEMIWEAK),
    (0.995, Regime.WEAK),
])
def test_classify_regime(I, regime):
    assert classify_regime(I) is regime


def test_closed_form_overlap_matches_gaussian_algebra(neutron):
    rng = np.random.default_rng(7)
    for _ in range(100):
        b = 10 ** rng.uniform(-3, 3)
        tau = 10 ** rng.uniform(-7, -1)
        delta = 10 ** rng.uniform(-8, -2)
        stage = SGStage.from_cgs(Axis.X, b, tau)
        state = evolve(initial_state(UP_Z, delta, axes=(Axis.X,)), stage, neutron)
        plus, minus = state.branches
        numeric = abs(inner_product(plus.packets[Axis.X], minus.packets[Axis.X]))
        assert math.isclose(overlap_I(stage, neutron, delta), numeric,
                            rel_tol=1e-10, abs_tol=1e-300)


def test_reduced_density_matrix(unit_particle):
    stage = x_stage(0.4, 1.5)
    state = evolve(initial_state(UP_Z, 1.0), stage, unit_particle)
    rho = reduced_density_matrix(state)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)
    assert abs(rho[0, 1]) == pytest.approx(0.5 * overlap_I(stage, unit_particle, 1.0))


def test_reduced_density_matrix_needs_one_stage(unit_particle):
    stages = [x_stage(0.4, 1.0), x_stage(0.4, 1.0)]
    with pytest.raises(WrongStageCount):
        reduced_density_matrix(run_stages(UP_Z, 1.0, stages, unit_particle))
    with pytest.raises(WrongStageCount):
        reduced_density_matrix(initial_state(UP_Z, 1.0))


def test_post_select_requires_a_stage():
    with pytest.raises(WrongStageCount):
        post_select(initial_state(UP_Z, 1.0), UP_Z)
    with pytest.raises(EmptyState):
        post_select(BranchState(branches=(), stages_applied=1), UP_Z)


def test_post_select_onto_unreachable_state(unit_particle):
    state = evolve(initial_state(UP_X, 1.0), x_stage(0.5, 1.0), unit_particle)
    pointer, probability = post_select(state, DOWN_X)
    assert pointer.terms == ()
    assert probability == 0.0


def test_zero_coupling_reduces_to_projection(unit_particle):
    chi_in, chi_f = bloch_state(1.3), bloch_state(0.4)
    state = evolve(initial_state(chi_in, 1.0), x_stage(0.0, 1.0), unit_particle)
    _, probability = post_select(state, chi_f)
    assert probability == pytest.approx(postselect_prob(chi_in, chi_f))


def test_marginalized_axis_gives_mixed_pointer(unit_particle):
    stages = [x_stage(0.8, 1.2), SGStage(axis=Axis.Z, gradient=0.8, transit_time=1.2)]
    state = run_stages(UP_Z, 1.0, stages, unit_particle)
    pointer, p_up = post_select(state, UP_X)
    _, p_down = post_select(state, DOWN_X)
    assert not pointer.is_pure
    assert p_up + p_down == pytest.approx(1.0, abs=1e-10)


def test_norm_and_completeness_over_random_sequences(unit_particle):
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n_stages = int(rng.integers(1, 4))
        stages = [SGStage(axis=Axis.X if rng.uniform() < 0.5 else Axis.Z,
                          gradient=rng.uniform(-1.0, 1.0),
                          transit_time=rng.uniform(0.1, 2.0)) for _ in range(n_stages)]
        chi_in = bloch_state(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        state = run_stages(chi_in, rng.uniform(0.3, 2.0), stages, unit_particle)
        assert state.squared_norm() == pytest.approx(1.0, abs=1e-10)

        chi_f = bloch_state(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        axis = stages[0].axis
        _, p_f = post_select(state, chi_f, axis)
        _, p_perp = post_select(state, orthogonal(chi_f), axis)
        assert p_f + p_perp == pytest.approx(1.0, abs=1e-10)
