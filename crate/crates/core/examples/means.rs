//! The three means and the logarithmic mean's behaviour near equal and
//! extreme arguments.

use hhverify::means::{arithmetic_mean, geometric_mean, logarithmic_mean, logarithmic_mean_ln};

fn main() {
    println!("{:>12} {:>12} {:>20} {:>20} {:>20}", "p", "q", "G", "L", "A");
    for (p, q) in [(1.0, 4.0), (1.0, std::f64::consts::E), (2.0, 2.0 + 1e-9), (1e-6, 1e6)] {
        let l = logarithmic_mean(p, q).unwrap();
        println!("{p:>12.4e} {q:>12.4e} {:>20.15} {l:>20.15} {:>20.15}", geometric_mean(p, q), arithmetic_mean(p, q));
    }

    // naive (p-q)/(ln p - ln q) loses digits as q approaches p
    let p = 3.0;
    for k in [4, 8, 12] {
        let q = p * (1.0 + 10f64.powi(-k));
        let naive = (p - q) / (p.ln() - q.ln());
        println!("gap 1e-{k:<2}: stable {:.17}  naive {naive:.17}", logarithmic_mean(p, q).unwrap());
    }

    // e^712 overflows f64 but L(e^712, e^690) does not
    let l = logarithmic_mean_ln(712.0, 690.0).unwrap();
    println!("L(e^712, e^690) = {l:.12e} = e^{:.12}", l.ln());
}
