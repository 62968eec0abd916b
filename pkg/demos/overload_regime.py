"""Overload regime: more streams than antennas.

With 3 served UEs and 14 UAVs on a 16-antenna array, channel inversion
needs a right inverse of a 17 x 16 matrix and fails structurally.  The
joint design only ever solves over the UE block (3 x 16), so it keeps
working: the UE beams deliver the jamming power as a side effect.

    python3 demos/overload_regime.py
"""

from jcjbeam import (
    AllEtaInfeasibleError,
    DimensionExceededError,
    ScenarioConfig,
    achievable_rate,
    mw_to_dbm,
    run_ci,
    run_jcj,
    sample_scenario,
    uav_sinr_db,
)

config = ScenarioConfig(n_ue=3, n_uav=14)

for realization in range(3):
    scenario = sample_scenario(config, 21, realization)
    print(f"realization {realization}:")
    try:
        run_ci(scenario)
        print("  channel inversion: unexpectedly succeeded")
    except DimensionExceededError as exc:
        print(f"  channel inversion: failed ({exc})")
    try:
        bf = run_jcj(scenario)
    except AllEtaInfeasibleError:
        print("  joint design: no candidate for this drop")
        continue
    rmin = min(
        achievable_rate(scenario.h_ue[:, n], bf.f, n, scenario.ues[n].noise_power_mw)
        for n in range(scenario.n_ue)
    )
    gmax = max(
        uav_sinr_db(
            scenario.h_uav[:, m], bf.f,
            scenario.uavs[m].eaves_power_mw, scenario.uavs[m].noise_power_mw,
        )
        for m in range(scenario.n_uav)
    )
    print(
        f"  joint design: {mw_to_dbm(bf.power_mw):.2f} dBm at eta {bf.chosen_eta}, "
        f"min rate {rmin:.3f} (threshold {scenario.r_th[0]:.0f}), "
        f"max UAV SINR {gmax:.2f} dB (ceiling {scenario.gamma_th_db[0]:.0f})"
    )
