//! Prints the full covariance diagnostics for the fluctuation experiment at
//! a few seeds and sizes. Development aid, not part of the test suite.

use thoma_rsk::params::ThomaParams;
use thoma_rsk::rsk::MapKind;
use thoma_rsk::stats::Harness;
use thoma_rsk::LinearOrder;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let trials: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seeds: Vec<u64> = args
        .get(3)
        .map(|s| s.split(',').map(|t| t.parse().unwrap()).collect())
        .unwrap_or_else(|| vec![20250809]);
    let poisson = args.get(4).map(|s| s == "poisson").unwrap_or(false);
    let params = ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap();
    for seed in seeds {
        let h = Harness {
            order: LinearOrder::for_params(&params),
            params: params.clone(),
            k: 2,
            l: 1,
            map: MapKind::Standard,
            seed,
            workers: None,
        };
        let r = if poisson {
            let p = h.run_clt_poisson(n as f64, trials).unwrap();
            thoma_rsk::stats::CltReport {
                config: p.config,
                n,
                moments: p.moments,
                ks: vec![],
                covariance_within_band: p.covariance_within_band,
                ks_within_limit: true,
                pass: p.pass,
            }
        } else {
            h.run_clt(n, trials).unwrap()
        };
        println!("seed {seed} n {n} trials {trials} poisson {poisson}");
        for i in 0..3 {
            for j in 0..3 {
                let m = &r.moments;
                let z = (m.covariance[i][j] - m.theoretical[i][j]) / m.covariance_se[i][j];
                println!(
                    "  C[{i}][{j}] emp {:+.5} theory {:+.5} se {:.5} z {:+.2}",
                    m.covariance[i][j], m.theoretical[i][j], m.covariance_se[i][j], z
                );
            }
        }
        println!(
            "  max dev {:.2} se; mean {:?}",
            r.moments.max_covariance_deviation_se,
            r.moments
                .mean
                .iter()
                .map(|v| format!("{v:+.4}"))
                .collect::<Vec<_>>()
        );
    }
}
