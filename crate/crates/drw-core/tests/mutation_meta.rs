//! Meta-test: every registered law must fail under at least one registered
//! mutation (the coverage table pins which one), so a silently broken
//! operator cannot pass the harness.

use drw_core::laws::{self, GridPoint, LawSuite};

fn meta_grid() -> Vec<GridPoint> {
    vec![
        GridPoint { p: 3, r: 1, depth: 1, m: 1 },
        GridPoint { p: 3, r: 1, depth: 1, m: 2 },
        GridPoint { p: 3, r: 1, depth: 2, m: 2 },
        GridPoint { p: 3, r: 1, depth: 1, m: 3 },
        GridPoint { p: 5, r: 1, depth: 1, m: 2 },
    ]
}

#[test]
fn every_law_fails_under_its_registered_mutation() {
    let coverage = laws::mutation_coverage();
    let all_laws = laws::suite_laws("all").unwrap();
    // the table covers every law
    for law in &all_laws {
        assert!(
            coverage.iter().any(|(id, _)| id == law),
            "law {law} has no registered mutation"
        );
    }
    let mut uncovered = vec![];
    for (law, mutation) in coverage {
        let suite = LawSuite {
            name: format!("meta:{law}"),
            grid: meta_grid(),
            samples: 24,
            seed: 1234,
            max_exp: 6,
            laws: vec![law],
        };
        let report = laws::run_suite(&suite, Some(mutation)).unwrap();
        if report.all_pass() {
            uncovered.push((law, mutation));
        }
    }
    assert!(
        uncovered.is_empty(),
        "laws not broken by their registered mutation: {uncovered:?}"
    );
}
