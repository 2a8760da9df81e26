use std::collections::BTreeMap;

use proptest::prelude::*;

use qpass_core::event::{augment, build_team_event_sets, roster_from_entries, team_ids};
use qpass_core::field_value::{accumulate_transitions, run_team_valuation, solve_field_values};
use qpass_core::oracle::{mirrored_absorbing_system, random_absorbing_system, value_iteration};
use qpass_core::partition::{build_partition, min_max_scale};
use qpass_core::qpass::{median, rank_players, score_team};
use qpass_core::synth::{generate_synthetic_league, SyntheticLeagueSpec};
use qpass_core::{
    Event, MatchEventLog, PartitionConfig, PassRecord, Point, QPassRecord, ScalerParams, StochasticMatrix,
    ValuationConfig,
};

fn small_cfg(c: usize) -> ValuationConfig {
    ValuationConfig {
        partition: PartitionConfig {
            c_max: c,
            c_min: c,
            c_step: 1,
            batch_size: 256,
            max_iterations: 100,
            tolerance: 1e-4,
            seed: 3,
        },
        ..ValuationConfig::default()
    }
}

fn league(seed: u64) -> Vec<MatchEventLog> {
    league_sized(40, seed)
}

fn league_sized(possessions: usize, seed: u64) -> Vec<MatchEventLog> {
    let spec = SyntheticLeagueSpec::league(2, 1, possessions, seed);
    generate_synthetic_league(&spec)
        .unwrap()
        .logs
        .into_iter()
        .map(augment)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mirror_is_an_involution_on_dyadic_grid(x in 0u32..=102_400, y in 0u32..=102_400) {
        let p = Point::new(f64::from(x) / 1024.0, f64::from(y) / 1024.0);
        prop_assert_eq!(p.mirror().mirror(), p);
    }

    #[test]
    fn mirror_is_an_involution_to_rounding(x in 0.0f64..=100.0, y in 0.0f64..=100.0) {
        let p = Point::new(x, y);
        let q = p.mirror().mirror();
        prop_assert!((q.x - x).abs() <= 1e-13 && (q.y - y).abs() <= 1e-13);
    }

    #[test]
    fn scaling_scaled_data_is_identity(
        pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 2..60)
    ) {
        let pts: Vec<[f64; 3]> = pts.into_iter().map(|(a, b, c)| [a, b, c]).collect();
        let (scaled, _) = min_max_scale(&pts).unwrap();
        let params = ScalerParams::fit(&scaled).unwrap();
        for i in 0..3 {
            prop_assume!(params.max[i] > params.min[i]);
        }
        for p in &scaled {
            let again = params.transform(p);
            for i in 0..3 {
                prop_assert!((again[i] - p[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ranking_order_ignores_constant_shift(
        values in prop::collection::vec((0usize..6, -1.0f64..1.0), 30..200),
        shift in -0.5f64..0.5,
    ) {
        let roster = roster_from_entries((0..6).map(|i| qpass_core::RosterEntry {
            player_id: format!("P{i}"),
            name: format!("Player {i}"),
            team_id: "T".into(),
            position: qpass_core::PositionGroup::Midfielder,
        }));
        let records: Vec<QPassRecord> = values.iter().enumerate().map(|(i, &(p, q))| record(i, p, q)).collect();
        let shifted: Vec<QPassRecord> = records.iter().map(|r| QPassRecord { qpass: r.qpass + shift, ..r.clone() }).collect();
        let a = rank_players(&records, &roster, 1).unwrap();
        let b = rank_players(&shifted, &roster, 1).unwrap();
        let ids = |r: &[qpass_core::PlayerRanking]| r.iter().map(|x| x.player_id.clone()).collect::<Vec<_>>();
        // ties may reorder once shifted values round differently; compare only strict gaps
        for w in a.windows(2) {
            if w[0].median_qpass - w[1].median_qpass > 1e-9 {
                let pos = |id: &str| ids(&b).iter().position(|x| x == id).unwrap();
                prop_assert!(pos(&w[0].player_id) < pos(&w[1].player_id));
            }
        }
        prop_assert_eq!(a.len(), b.len());
    }

    #[test]
    fn median_survives_duplication(mut values in prop::collection::vec(-1.0f64..1.0, 1..100)) {
        let mut doubled: Vec<f64> = values.iter().chain(values.iter()).copied().collect();
        prop_assert_eq!(median(&mut values), median(&mut doubled));
    }
}

fn record(i: usize, player: usize, qpass: f64) -> QPassRecord {
    QPassRecord {
        match_id: "M".into(),
        seq: i as u64,
        source_seq: Some(i as u64),
        team_id: "T".into(),
        player_id: format!("P{player}"),
        is_virtual: false,
        start: Point::new(0.0, 0.0),
        end: Point::new(0.0, 0.0),
        successful: true,
        c_s: 0,
        c_e: 0,
        l_e: None,
        f_s: 0.0,
        f_e: 0.0,
        l_e_value: None,
        qpass,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solvers_agree_and_stay_bounded(c in 2usize..=10, seed in any::<u64>(), s in 0.0f64..=1.0) {
        let p = random_absorbing_system(c, s, seed).unwrap();
        let direct = solve_field_values(&p, &ValuationConfig::default()).unwrap();
        let (iterated, _) = value_iteration(&p, 1e-13, 1_000_000).unwrap();
        for (a, b) in direct.values.iter().zip(&iterated.values) {
            prop_assert!((a - b).abs() <= 1e-9);
            prop_assert!((-1.0..=1.0).contains(a));
        }
    }

    #[test]
    fn mirrored_systems_are_antisymmetric(c in 1usize..=12, seed in any::<u64>()) {
        let p = mirrored_absorbing_system(c, 0.7, seed).unwrap();
        let fv = solve_field_values(&p, &ValuationConfig::default()).unwrap();
        for k in 0..c {
            prop_assert!((fv.own(k) + fv.opp(k)).abs() <= 1e-9);
        }
    }

    #[test]
    fn shot_value_raises_values_without_conceded_shots(c in 1usize..=8, seed in any::<u64>(), lo in 0.0f64..0.9) {
        let hi = lo + 0.1;
        // drop the conceded-shot terminal from every row
        let base = random_absorbing_system(c, lo, seed).unwrap();
        let rows: Vec<Vec<(usize, f64)>> = (0..2 * c)
            .map(|i| {
                base.row(i)
                    .iter()
                    .map(|&(j, w)| (if j == 2 * c + 3 { 2 * c + 1 } else { j }, w))
                    .collect()
            })
            .collect();
        let low = StochasticMatrix::from_rows(c, rows.clone(), lo).unwrap();
        let high = StochasticMatrix::from_rows(c, rows, hi).unwrap();
        let cfg = ValuationConfig::default();
        let a = solve_field_values(&low, &cfg).unwrap();
        let b = solve_field_values(&high, &cfg).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!(y + 1e-12 >= *x);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_logs_chain_and_partition(seed in any::<u64>()) {
        for log in league(seed) {
            check_chain_and_possessions(&log)?;
        }
    }

    #[test]
    fn transition_counts_are_conserved(seed in any::<u64>()) {
        let logs = league(seed);
        for team in team_ids(&logs) {
            let set = build_team_event_sets(&logs, &team).unwrap();
            let cfg = small_cfg(8);
            let (_, assignments) = build_partition(&set, None, 8, &cfg.partition).unwrap();
            let ts = accumulate_transitions(&assignments, &set, 8, 0.7).unwrap();
            let mut expected = 0usize;
            for (passes, shots, assists) in [
                (&set.own_passes, &set.own_shots, &set.own_shot_assists),
                (&set.opponent_passes, &set.opponent_shots, &set.opponent_shot_assists),
            ] {
                let ok = passes.iter().filter(|p| p.successful).count();
                let handover = passes.iter().filter(|p| p.successful && p.changes_possession()).count();
                let lost = passes.iter().filter(|p| !p.successful).count();
                let assisted = assists.iter().filter(|a| a.is_some()).count();
                expected += ok + handover + lost + shots.len() + assisted;
            }
            prop_assert_eq!(ts.total(), expected as f64);
        }
    }
}

fn check_chain_and_possessions(log: &MatchEventLog) -> Result<(), TestCaseError> {
    let mut seen: BTreeMap<u32, &str> = BTreeMap::new();
    let mut last_id = 0u32;
    let mut prev: Option<&PassRecord> = None;
    for (i, event) in log.events.iter().enumerate() {
        prop_assert_eq!(event.seq(), i as u64 + 1);
        let id = event.possession_id();
        prop_assert!(id >= last_id, "possession ids must not go back");
        last_id = id;
        let owner = seen.entry(id).or_insert(event.team_id());
        prop_assert_eq!(*owner, event.team_id());
        match event {
            Event::Pass(p) => {
                for v in [p.start.x, p.start.y, p.end.x, p.end.y] {
                    prop_assert!((0.0..=100.0).contains(&v));
                }
                if let Some(q) = prev {
                    if q.possession_id == p.possession_id && q.successful {
                        prop_assert_eq!(q.end, p.start);
                    }
                }
                prev = Some(p);
            }
            Event::Shot(_) => prev = None,
        }
    }
    Ok(())
}

#[test]
fn telescoping_over_generated_possessions() {
    let logs = league_sized(400, 11);
    let team = team_ids(&logs)[0].clone();
    let set = build_team_event_sets(&logs, &team).unwrap();
    let val = run_team_valuation(&set, &small_cfg(12)).unwrap();
    let records = score_team(&set.own_passes, &val).unwrap();
    let mut chains: BTreeMap<(String, u32), Vec<(&PassRecord, &QPassRecord)>> = BTreeMap::new();
    for (p, r) in set.own_passes.iter().zip(&records) {
        chains.entry((p.match_id.clone(), p.possession_id)).or_default().push((p, r));
    }
    let mut checked = 0;
    for chain in chains.values() {
        // successful run at the start of the possession
        let run = chain.iter().take_while(|(p, _)| p.successful).count();
        let chain = &chain[..run];
        let clean = chain.len() >= 2
            && chain.windows(2).all(|w| w[0].0.end == w[1].0.start && w[0].1.c_e == w[1].1.c_s);
        if !clean {
            continue;
        }
        let sum: f64 = chain.iter().map(|(_, r)| r.qpass).sum();
        let first = chain[0].1;
        let last = chain[chain.len() - 1].1;
        let direct = val.values.own(last.c_e) - val.values.own(first.c_s);
        assert!((sum - direct).abs() <= 1e-12, "sum {sum} vs {direct}");
        checked += 1;
    }
    assert!(checked > 20, "only {checked} clean possessions");
}

#[test]
fn shot_propensity_raises_shot_share() {
    let share = |scale: f64| {
        let mut spec = SyntheticLeagueSpec::league(2, 4, 150, 5);
        spec.teams[0].shot_propensity = spec.teams[0].shot_propensity.map(|p| (p * scale).min(1.0));
        let logs: Vec<MatchEventLog> = generate_synthetic_league(&spec)
            .unwrap()
            .logs
            .into_iter()
            .map(augment)
            .collect();
        let team = qpass_core::synth::team_id(0);
        let mut possessions = 0usize;
        let mut with_shot = 0usize;
        for log in &logs {
            let mut ends: BTreeMap<u32, bool> = BTreeMap::new();
            for e in log.events.iter().filter(|e| e.team_id() == team) {
                ends.insert(e.possession_id(), matches!(e, Event::Shot(_)));
            }
            possessions += ends.len();
            with_shot += ends.values().filter(|&&s| s).count();
        }
        with_shot as f64 / possessions as f64
    };
    let shares: Vec<f64> = [0.5, 1.0, 2.0, 3.0].iter().map(|&s| share(s)).collect();
    assert!(shares.windows(2).all(|w| w[1] > w[0]), "{shares:?}");
}
