//! Minimum-margin search over a family box: finds the constant-function
//! counterexample to the printed bound and shows the corrected one is tight.

use std::collections::BTreeMap;

use hhverify::bounds::Variant;
use hhverify::funcspec::Family;
use hhverify::verify::{self, Range, SearchBox, SearchOptions, Theorem};

fn main() {
    let bx = SearchBox {
        family: Family::ExpAffine,
        family_ranges: BTreeMap::from([("c".to_string(), Range::new(0.1, 1.0)), ("k".to_string(), Range::new(-1.0, 1.0))]),
        a: Range::fixed(0.0),
        b: Range::new(0.5, 2.0),
        alpha: Range::fixed(1.0),
        m: Range::fixed(1.0),
    };
    let opts = SearchOptions { budget: 400, ..Default::default() };
    for variant in [Variant::Printed, Variant::Corrected] {
        let r = verify::search_min_margin(&bx, Theorem::Eq22, variant, &opts).unwrap();
        let p = r.best_params.as_ref().unwrap();
        println!(
            "eq22 {:<9}: min margin {:+.6e} at {} on [{:.3}, {:.3}] after {} evaluations",
            variant.name(),
            r.best_margin.unwrap(),
            p.family.as_ref().unwrap(),
            p.a,
            p.b,
            r.evaluations
        );
    }
}
