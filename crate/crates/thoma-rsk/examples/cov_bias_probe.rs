//! Exact finite-size covariance of (λ1, λ2, λ'1) from the measure tables,
//! compared against the limit matrix: prints n·(Cov_n/n − C) per entry to
//! expose the 1/n correction. Development aid.

use thoma_rsk::exact::measure;
use thoma_rsk::params::ThomaParams;
use thoma_rsk::stats::theoretical_covariance;

fn main() {
    let params = ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap();
    let c = theoretical_covariance(&params, 2, 1).unwrap();
    println!("limit: diag {:.4} {:.4} {:.4}", c[0][0], c[1][1], c[2][2]);
    for n in [6, 10, 14, 18, 20] {
        let m = measure(&params, n).unwrap();
        let stat = |f: &dyn Fn(&thoma_rsk::YoungDiagram) -> f64| -> f64 {
            m.iter().map(|(s, p)| f(s) * p).sum()
        };
        let vals: Vec<Box<dyn Fn(&thoma_rsk::YoungDiagram) -> f64>> = vec![
            Box::new(|s| s.row(1) as f64),
            Box::new(|s| s.row(2) as f64),
            Box::new(|s| s.transpose().row(1) as f64),
        ];
        let means: Vec<f64> = vals.iter().map(|f| stat(&|s| f(s))).collect();
        print!("n={n:2} drift:");
        let targets = [0.4, 0.25, 0.2];
        for (i, mv) in means.iter().enumerate() {
            print!(" {:+.3}", mv - targets[i] * n as f64);
        }
        print!("  n*(Cov/n - C):");
        for i in 0..3 {
            for j in i..3 {
                let second = stat(&|s| vals[i](s) * vals[j](s));
                let cov = second - means[i] * means[j];
                let d = cov - c[i][j] * n as f64;
                print!(" [{i}{j}] {d:+.3}");
            }
        }
        println!();
    }
}
