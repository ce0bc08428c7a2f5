use coxart::config::InstanceConfig;
use coxart::coxeter::CoxeterSystem;
use coxart::garside::{ArtinWord, GarsideEngine};
use coxart::geometry::AxisContext;
use coxart::lattice::NcLattice;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

fn main() {
    for (name, cfg) in [
        ("3,3,4", InstanceConfig::from_triple((3, 3, 4))),
        ("2,3,7", InstanceConfig::from_triple((2, 3, 7))),
        ("2,4,5", InstanceConfig::from_triple((2, 4, 5))),
    ] {
        let t0 = Instant::now();
        let e = GarsideEngine::new(NcLattice::new(
            AxisContext::new(CoxeterSystem::new(cfg).unwrap()).unwrap(),
        ));
        println!("({name}) context built in {:?}", t0.elapsed());
        let mut rng = StdRng::seed_from_u64(99);
        for trial in 0..3 {
            let w1 = ArtinWord(
                (0..64)
                    .map(|_| (rng.gen_range(0..3usize), rng.gen_bool(0.5)))
                    .collect(),
            );
            let w2 = ArtinWord(
                (0..64)
                    .map(|_| (rng.gen_range(0..3usize), rng.gen_bool(0.5)))
                    .collect(),
            );
            let t = Instant::now();
            let eq = e.word_problem(&w1, &w2).unwrap();
            println!("({name}) wp trial {trial} len 64: {:?} (equal: {eq})", t.elapsed());
        }
    }
}
