//! A parameter sweep over a family, with one classification per family point
//! and CSV output on stdout.

use hhverify::bounds::Variant;
use hhverify::funcspec::Family;
use hhverify::report::{self, Format};
use hhverify::verify::{self, FamilyGrid, SweepGrid, SweepOptions, Theorem};

fn main() {
    let family = FamilyGrid::new(Family::ExpAffine, [("c", vec![0.5, 1.0, 1.5]), ("k", vec![-1.0, 2.0])]);
    let grid = SweepGrid {
        families: family.members(),
        a: vec![0.0, 0.5],
        b: vec![1.0, 2.0],
        alpha: vec![0.5, 1.0],
        m: vec![0.5, 1.0],
        theorems: vec![Theorem::Eq4, Theorem::Eq31],
        variant: Variant::Corrected,
    };
    let opts = SweepOptions { check_hypothesis: true, ..Default::default() };
    let summary = verify::sweep(&grid, &opts).unwrap();

    let mut stdout = std::io::stdout();
    report::emit_report(&summary, Format::Csv, None, &mut stdout).unwrap();

    let c = summary.counts;
    eprintln!("{} holds, {} violated, {} inapplicable, {} inconclusive", c.holds, c.violated, c.inapplicable, c.inconclusive);
    // every violation sits outside the hypothesis
    let gated = summary
        .reports
        .iter()
        .filter(|r| r.verdict == verify::Verdict::Violated)
        .all(|r| r.hypothesis.status != verify::HypothesisStatus::Pass);
    eprintln!("violations only where the classifier refutes the hypothesis: {gated}");
}
