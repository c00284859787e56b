//! Writes `data/toy_votes.csv`: 400 items, each judged by 9 annotators, with
//! three noisy views of a latent score as features. Most items are close
//! calls, so |Δ| is concentrated near zero.
//!
//! `cargo run -p costeval --example make_toy_votes [path]`

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Binomial, StandardNormal};

use costeval::rng::{stream, Stream};

const ITEMS: usize = 400;
const ANNOTATORS: u64 = 9;
const VIEWS: usize = 3;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/toy_votes.csv").to_string());
    let mut rng = stream(2024, Stream::Demo);
    let mut out = String::from("f0,f1,f2,n_yes,n_no\n");
    for _ in 0..ITEMS {
        let z: f64 = rng.sample(StandardNormal);
        let p_yes = 1.0 / (1.0 + (-0.6 * z).exp());
        let yes = rng.sample(Binomial::new(ANNOTATORS, p_yes).unwrap());
        let views: Vec<String> = (0..VIEWS)
            .map(|_| {
                let noise: f64 = rng.sample(StandardNormal);
                format!("{:.4}", z + 0.5 * noise)
            })
            .collect();
        writeln!(out, "{},{},{}", views.join(","), yes, ANNOTATORS - yes).unwrap();
    }
    std::fs::write(&path, out).unwrap();
    println!("{path}");
}
