//! Twelve single-topic evaluation scenarios with expected metric values
//! computed by a separate evaluator and frozen here.

pub struct MetricFixture {
    pub name: &'static str,
    /// Grades keyed by doc id for topic "1".
    pub judgments: &'static [(&'static str, u8)],
    pub ranking: &'static [&'static str],
    /// P@5, P@10, P@20, nDCG@10.
    pub expected: [f64; 4],
}

pub const METRIC_FIXTURES: [MetricFixture; 12] = [
    MetricFixture {
        name: "single_grade4_rank2",
        judgments: &[("A", 4)],
        ranking: &["X", "A"],
        expected: [0.2, 0.1, 0.05, 0.6309297536],
    },
    MetricFixture {
        name: "single_grade4_rank1",
        judgments: &[("A", 4)],
        ranking: &["A", "X", "Y"],
        expected: [0.2, 0.1, 0.05, 1.0],
    },
    MetricFixture {
        name: "none_relevant",
        judgments: &[("A", 0), ("B", 0)],
        ranking: &["A", "B", "C"],
        expected: [0.0, 0.0, 0.0, 0.0],
    },
    MetricFixture {
        name: "all_relevant_20",
        judgments: &[
            ("R00", 4),
            ("R01", 3),
            ("R02", 2),
            ("R03", 1),
            ("R04", 1),
            ("R05", 4),
            ("R06", 3),
            ("R07", 2),
            ("R08", 1),
            ("R09", 1),
            ("R10", 4),
            ("R11", 3),
            ("R12", 2),
            ("R13", 1),
            ("R14", 1),
            ("R15", 4),
            ("R16", 3),
            ("R17", 2),
            ("R18", 1),
            ("R19", 1),
            ("R20", 4),
            ("R21", 3),
            ("R22", 2),
            ("R23", 1),
            ("R24", 1),
        ],
        ranking: &[
            "R00", "R05", "R10", "R15", "R20", "R01", "R06", "R11", "R16", "R21", "R02", "R07", "R12", "R17", "R22",
            "R03", "R04", "R08", "R09", "R13", "R14", "R18", "R19", "R23", "R24",
        ],
        expected: [1.0, 1.0, 1.0, 1.0],
    },
    MetricFixture {
        name: "ranks_1_and_3",
        judgments: &[("A", 2), ("B", 1)],
        ranking: &["A", "X", "B", "Y", "Z"],
        expected: [0.4, 0.2, 0.1, 0.9639404333],
    },
    MetricFixture {
        name: "short_run_three_relevant",
        judgments: &[("A", 1), ("B", 3), ("C", 2)],
        ranking: &["A", "B", "C"],
        expected: [0.6, 0.3, 0.15, 0.7363636171],
    },
    MetricFixture {
        name: "empty_run",
        judgments: &[("A", 3)],
        ranking: &[],
        expected: [0.0, 0.0, 0.0, 0.0],
    },
    MetricFixture {
        name: "mixed_grades",
        judgments: &[("A", 4), ("B", 3), ("C", 2), ("D", 1), ("E", 0)],
        ranking: &["E", "D", "C", "B", "A", "F"],
        expected: [0.8, 0.4, 0.2, 0.5128759532],
    },
    MetricFixture {
        name: "relevant_below_cutoff",
        judgments: &[("A", 4), ("B", 4)],
        ranking: &["N0", "N1", "N2", "N3", "N4", "N5", "N6", "N7", "N8", "N9", "A", "B"],
        expected: [0.0, 0.0, 0.1, 0.0],
    },
    MetricFixture {
        name: "unjudged_interleaved",
        judgments: &[("A", 1), ("B", 2), ("C", 3), ("D", 4), ("G", 1)],
        ranking: &[
            "U1", "D", "U2", "C", "U3", "B", "U4", "A", "U5", "U6", "U7", "U8", "U9", "U10", "U11", "U12", "U13",
            "U14", "U15", "U16", "G",
        ],
        expected: [0.4, 0.4, 0.2, 0.6378367829],
    },
    MetricFixture {
        name: "ideal_order_many_grades",
        judgments: &[("A", 3), ("B", 3), ("C", 2), ("D", 1), ("E", 1), ("F", 1)],
        ranking: &["A", "B", "C", "D", "E", "F"],
        expected: [1.0, 0.6, 0.3, 1.0],
    },
    MetricFixture {
        name: "grade1_only",
        judgments: &[("A", 1), ("B", 1), ("C", 1)],
        ranking: &["X", "A", "Y", "B", "Z", "C"],
        expected: [0.4, 0.3, 0.15, 0.6653497124],
    },
];

impl MetricFixture {
    pub const TOPIC: &'static str = "1";

    /// Qrels in TREC text form, so tests can go through the parser.
    pub fn qrels_text(&self) -> String {
        self.judgments
            .iter()
            .map(|(d, g)| format!("{} 0 {d} {g}\n", Self::TOPIC))
            .collect()
    }

    /// Run in TREC text form with strictly decreasing scores. Empty for
    /// scenarios where the topic was not retrieved at all.
    pub fn run_text(&self, tag: &str) -> String {
        self.ranking
            .iter()
            .enumerate()
            .map(|(i, d)| format!("{} Q0 {d} {} {} {tag}\n", Self::TOPIC, i + 1, 100 - i))
            .collect()
    }
}
