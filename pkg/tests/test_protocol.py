import pytest

from decoyroute import (
    AttackConfig,
    AttackMode,
    Basis,
    ChannelModel,
    DisturbanceStats,
    Eavesdropper,
    SlotAssignment,
    SlotType,
    Streams,
    baseline_disturbance,
    detect_eavesdropper,
    estimate_disturbance,
    generate_schedule,
    run_simulation,
    run_type1_slot,
    run_type2_slot,
    run_type3_slot,
)

import oracles

NO_LOSS = ChannelModel(T=1.0, gamma=0.0, mu=0.0)


def make_streams(seed: int) -> Streams:
    return Streams.from_seed(seed)


def type2(cycle=0, basis=Basis.Z) -> SlotAssignment:
    return SlotAssignment(SlotType.TYPE2, cycle, 0, 1, basis)


def type3(cycle=0) -> SlotAssignment:
    return SlotAssignment(SlotType.TYPE3, cycle, 0, 1)


class TestGenerateSchedule:
    def test_counts_and_free_cycles(self):
        schedule = generate_schedule(10, [(0, 1)], 2, 3, shared_seed=5)
        assert schedule.count(SlotType.TYPE2) == 2
        assert schedule.count(SlotType.TYPE3) == 3
        assert schedule.K - len(schedule.assignments) == 5

    def test_deterministic_in_shared_seed(self):
        first = generate_schedule(50, [(0, 1), (2, 3)], 4, 4, shared_seed=9)
        second = generate_schedule(50, [(0, 1), (2, 3)], 4, 4, shared_seed=9)
        assert first == second

    def test_over_subscription_rejected(self):
        with pytest.raises(ValueError, match="over-subscribed"):
            generate_schedule(4, [(0, 1)], 3, 2, shared_seed=0)

    def test_return_cycle_budget_rejected(self):
        # 4 decoys need 4 return cycles; only 3 non-adjacent slots fit in K=6.
        with pytest.raises(ValueError, match="return cycles"):
            generate_schedule(6, [(0, 1)], 2, 2, shared_seed=0)

    def test_no_decoy_on_anothers_return_cycle(self):
        for seed in range(20):
            schedule = generate_schedule(40, [(0, 1)], 5, 5, shared_seed=seed)
            cycles = sorted(a.cycle for a in schedule.assignments)
            assert all(b - a >= 2 for a, b in zip(cycles, cycles[1:]))

    def test_distinct_seeds_give_distinct_cycle_sets(self):
        differing = 0
        for seed in range(100):
            first = generate_schedule(500, [(0, 1)], 10, 10, shared_seed=seed)
            second = generate_schedule(500, [(0, 1)], 10, 10, shared_seed=seed + 10_000)
            differing += {a.cycle for a in first.assignments} != {
                a.cycle for a in second.assignments
            }
        assert differing == 100

    def test_type2_basis_uniform(self):
        schedule = generate_schedule(4000, [(0, 1)], 1000, 0, shared_seed=3)
        z_count = sum(a.basis is Basis.Z for a in schedule.assignments)
        assert z_count / 1000 == pytest.approx(0.5, abs=oracles.binomial_tolerance(0.5, 1000))

    def test_rejects_self_pair(self):
        with pytest.raises(ValueError, match="sender == receiver"):
            generate_schedule(10, [(2, 2)], 1, 1, shared_seed=0)


class TestType1Slot:
    def test_no_loss_no_eve(self):
        eve = Eavesdropper(AttackConfig())
        record = run_type1_slot(
            SlotAssignment(SlotType.TYPE1, 0, 0, 1), 1, NO_LOSS, eve, make_streams(0)
        )
        assert record.delivered and not record.eve_learned_endpoints

    def test_full_path_attack_reads_every_slot(self):
        eve = Eavesdropper(AttackConfig(mode=AttackMode.PATH, eta_path=1.0))
        streams = make_streams(1)
        for cycle in range(0, 200, 2):
            record = run_type1_slot(
                SlotAssignment(SlotType.TYPE1, cycle, 0, 1), 0, NO_LOSS, eve, streams
            )
            assert record.eve_learned_endpoints
        assert len(eve.ledger.learned_endpoints) == 100

    def test_delivery_frequency_matches_transmissivity(self):
        channel = ChannelModel(T=0.6457, gamma=0.0, mu=0.0)
        eve = Eavesdropper(AttackConfig())
        streams = make_streams(2)
        n = 100_000
        delivered = sum(
            run_type1_slot(
                SlotAssignment(SlotType.TYPE1, 2 * i, 0, 1), 0, channel, eve, streams
            ).delivered
            for i in range(n)
        )
        assert delivered / n == pytest.approx(0.6457, abs=oracles.binomial_tolerance(0.6457, n))


class TestType2Slot:
    def run_many(self, channel, attack, n=100_000, seed=0):
        eve = Eavesdropper(attack)
        streams = make_streams(seed)
        stats = DisturbanceStats()
        for i in range(n):
            basis = Basis.Z if i % 2 else Basis.X
            run_type2_slot(type2(2 * i, basis), channel, eve, streams, stats)
        return stats

    def test_noiseless_no_eve_error_free(self):
        stats = self.run_many(NO_LOSS, AttackConfig(), n=5000)
        assert stats.d2_hat == 0.0

    def test_full_message_attack_gives_quarter(self):
        stats = self.run_many(
            NO_LOSS, AttackConfig(mode=AttackMode.MESSAGE, eta_msg=1.0), seed=7
        )
        expected = oracles.intercept_resend_error_rate()
        tol = oracles.binomial_tolerance(expected, stats.type2_trials, 3)
        assert stats.d2_hat == pytest.approx(expected, abs=tol)

    def test_half_loss_gives_quarter(self):
        stats = self.run_many(ChannelModel(T=0.5), AttackConfig(), seed=8)
        tol = oracles.binomial_tolerance(0.25, stats.type2_trials, 3)
        assert stats.d2_hat == pytest.approx(0.25, abs=tol)

    def test_partial_message_attack_rate(self):
        stats = self.run_many(
            NO_LOSS, AttackConfig(mode=AttackMode.MESSAGE, eta_msg=0.4), n=50_000, seed=9
        )
        tol = oracles.binomial_tolerance(0.1, stats.type2_trials)
        assert stats.d2_hat == pytest.approx(0.4 / 4.0, abs=tol)


class TestType3Slot:
    def run_many(self, channel, attack, n=50_000, seed=0):
        eve = Eavesdropper(attack)
        streams = make_streams(seed)
        stats = DisturbanceStats()
        for i in range(n):
            run_type3_slot(type3(2 * i), channel, eve, streams, stats)
        return stats

    def test_noiseless_no_eve_error_free(self):
        stats = self.run_many(NO_LOSS, AttackConfig(), n=5000)
        assert stats.d3_hat == 0.0

    def test_full_path_attack_gives_half(self):
        stats = self.run_many(NO_LOSS, AttackConfig(mode=AttackMode.PATH, eta_path=1.0), seed=4)
        tol = oracles.binomial_tolerance(0.5, stats.type3_trials, 3)
        assert stats.d3_hat == pytest.approx(0.5, abs=tol)

    def test_visibility_error_alone(self):
        stats = self.run_many(ChannelModel(T=1.0, gamma=0.01), AttackConfig(), seed=5)
        tol = oracles.binomial_tolerance(0.01, stats.type3_trials, 3)
        assert stats.d3_hat == pytest.approx(0.01, abs=tol)

    @pytest.mark.parametrize("T", [1.0, 0.8, 0.6457, 0.5])
    @pytest.mark.parametrize("gamma", [0.0, 0.05])
    def test_baseline_grid(self, T, gamma):
        stats = self.run_many(
            ChannelModel(T=T, gamma=gamma), AttackConfig(), n=30_000,
            seed=hash((T, gamma)) % 2**32,
        )
        expected = baseline_disturbance(gamma, T)
        tol = oracles.binomial_tolerance(expected, stats.type3_trials)
        assert stats.d3_hat == pytest.approx(expected, abs=max(tol, 1e-12))

    @pytest.mark.parametrize("eta", [0.0, 0.25, 0.5, 1.0])
    def test_combined_attack_and_baseline_law(self, eta):
        channel = ChannelModel(T=0.8, gamma=0.05)
        stats = self.run_many(
            channel,
            AttackConfig(mode=AttackMode.PATH, eta_path=eta),
            n=30_000,
            seed=int(eta * 100) + 13,
        )
        base = baseline_disturbance(channel.gamma, channel.T)
        expected = eta / 2.0 + (1.0 - eta) * base
        tol = oracles.binomial_tolerance(expected, stats.type3_trials)
        assert stats.d3_hat == pytest.approx(expected, abs=tol)

    def test_message_attack_leaves_path_decoys_quiet(self):
        stats = self.run_many(
            NO_LOSS, AttackConfig(mode=AttackMode.MESSAGE, eta_msg=1.0), n=5000, seed=6
        )
        assert stats.d3_hat == 0.0


def test_estimate_disturbance():
    assert estimate_disturbance(DisturbanceStats(100, 0, 100, 0)) == (0.0, 0.0)
    assert estimate_disturbance(DisturbanceStats(1000, 250, 10, 5)) == (0.25, 0.5)
    assert estimate_disturbance(DisturbanceStats()) == (None, None)


def test_detect_eavesdropper_table():
    assert not detect_eavesdropper(0.01, 0.01, 0.05, 0.05)
    assert detect_eavesdropper(0.01, 0.30, 0.05, 0.05)
    assert detect_eavesdropper(0.06, 0.01, 0.05, 0.05)
    assert not detect_eavesdropper(None, None, 0.05, 0.05)
    with pytest.raises(ValueError):
        detect_eavesdropper(0.1, 0.1, 0.7, 0.05)


def test_run_simulation_clean_network():
    result = run_simulation(
        K=400, h2_per_pair=40, h3_per_pair=40, channel=NO_LOSS,
        attack=AttackConfig(), seed=21,
    )
    pair = result.pairs[0]
    assert pair.d2_hat == 0.0 and pair.d3_hat == 0.0
    assert not result.detected
    assert result.inferred_eta == 0.0
    assert result.actual_learned_fraction == 0.0


def test_run_simulation_detects_path_attack():
    result = run_simulation(
        K=4000, h2_per_pair=200, h3_per_pair=400, channel=NO_LOSS,
        attack=AttackConfig(mode=AttackMode.PATH, eta_path=0.5), seed=22,
    )
    pair = result.pairs[0]
    tol = oracles.binomial_tolerance(0.25, pair.stats.type3_trials)
    assert pair.d3_hat == pytest.approx(0.25, abs=tol)
    assert result.detected
    assert result.leaked_fraction_bound >= result.actual_learned_fraction


def test_run_simulation_deterministic():
    kwargs = dict(
        K=800, h2_per_pair=50, h3_per_pair=50,
        channel=ChannelModel(T=0.9, gamma=0.01, mu=0.01),
        attack=AttackConfig(mode=AttackMode.BOTH, eta_path=0.3, eta_msg=0.3),
        seed=23,
    )
    first = run_simulation(**kwargs)
    second = run_simulation(**kwargs)
    assert first.pairs == second.pairs
    assert first.schedule == second.schedule


def test_run_simulation_attack_mode_does_not_shift_channel_noise():
    # Same seed, same schedule: the loss pattern seen by the decoys is
    # identical whether or not Eve taps their content, so with gamma = 0
    # the purely loss-driven path-decoy error pattern is unchanged.
    kwargs = dict(
        K=2000, h2_per_pair=0, h3_per_pair=200,
        channel=ChannelModel(T=0.7), seed=24, traffic="silent",
    )
    quiet = run_simulation(attack=AttackConfig(), **kwargs)
    noisy = run_simulation(
        attack=AttackConfig(mode=AttackMode.MESSAGE, eta_msg=1.0), **kwargs
    )
    assert quiet.pairs[0].stats.type3_errors == noisy.pairs[0].stats.type3_errors


def test_no_attack_leaves_ledger_empty():
    result = run_simulation(
        K=2000, h2_per_pair=100, h3_per_pair=100,
        channel=ChannelModel(T=0.8, gamma=0.01, mu=0.01),
        attack=AttackConfig(mode=AttackMode.NONE, eta_path=0.9, eta_msg=0.9),
        seed=28,
    )
    ledger = result.eavesdropper.ledger
    assert not ledger.intercepted_cycles
    assert not ledger.learned_endpoints
    assert not ledger.learned_bits


def test_run_simulation_silent_traffic_has_no_type1():
    result = run_simulation(
        K=400, h2_per_pair=20, h3_per_pair=20, channel=NO_LOSS,
        attack=AttackConfig(), seed=25, traffic="silent",
    )
    assert result.pairs[0].type1_slots == 0
    assert result.actual_learned_fraction is None


def test_run_simulation_learned_fraction_tracks_rate():
    result = run_simulation(
        K=20_000, h2_per_pair=0, h3_per_pair=1000, channel=NO_LOSS,
        attack=AttackConfig(mode=AttackMode.PATH, eta_path=0.4), seed=26,
    )
    pair = result.pairs[0]
    assert pair.type1_slots > 5000
    tol = oracles.binomial_tolerance(0.4, pair.type1_slots)
    assert pair.eve_learned_fraction == pytest.approx(0.4, abs=tol)


@pytest.mark.parametrize("eta", [0.1, 0.25, 0.5, 1.0])
def test_leak_bound_is_conservative_with_baseline_noise(eta):
    # With a nonzero baseline, worst-case attribution over-counts: the
    # inferred leak strictly dominates what the ledger actually holds.
    result = run_simulation(
        K=80_000, h2_per_pair=2000, h3_per_pair=20_000,
        channel=ChannelModel(T=0.9, gamma=0.01, mu=0.01),
        attack=AttackConfig(mode=AttackMode.PATH, eta_path=eta),
        seed=int(eta * 1000) + 31,
    )
    assert result.leaked_fraction_bound >= result.actual_learned_fraction


def test_run_simulation_multiple_pairs():
    result = run_simulation(
        K=1000, node_pairs=[(0, 1), (2, 3), (1, 0)], h2_per_pair=30, h3_per_pair=30,
        channel=NO_LOSS, attack=AttackConfig(), seed=27,
    )
    assert len(result.pairs) == 3
    for pair in result.pairs:
        assert pair.stats.type2_trials == 30
        assert pair.stats.type3_trials == 30
        assert pair.d2_hat == 0.0 and pair.d3_hat == 0.0


def test_type3_errors_only_ever_increment_trials_once():
    stats = DisturbanceStats()
    eve = Eavesdropper(AttackConfig())
    run_type3_slot(type3(), NO_LOSS, eve, make_streams(0), stats)
    assert (stats.type3_trials, stats.type2_trials) == (1, 0)


def test_slot_runners_validate_slot_type():
    eve = Eavesdropper(AttackConfig())
    with pytest.raises(ValueError):
        run_type2_slot(type3(), NO_LOSS, eve, make_streams(0), DisturbanceStats())
    with pytest.raises(ValueError):
        run_type3_slot(type2(), NO_LOSS, eve, make_streams(0), DisturbanceStats())
