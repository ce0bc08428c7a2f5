use coxart::config::InstanceConfig;
use coxart::coxeter::CoxeterSystem;
use coxart::garside::{ArtinWord, GarsideEngine, TwistedFactor};
use coxart::geometry::AxisContext;
use coxart::lattice::NcLattice;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::{Duration, Instant};

fn main() {
    let cfg = InstanceConfig::from_triple((2, 3, 7));
    let lat = NcLattice::new(AxisContext::new(CoxeterSystem::new(cfg).unwrap()).unwrap());
    let e = GarsideEngine::new(lat);
    let lat = &e.lat;
    let mut rng = StdRng::seed_from_u64(99);
    let w1 = ArtinWord(
        (0..64)
            .map(|_| (rng.gen_range(0..3usize), rng.gen_bool(0.5)))
            .collect(),
    );
    // replicate from_artin_word's factor construction
    let sys = &lat.ctx.system;
    let total_inv = w1.0.iter().filter(|&&(_, i)| i).count() as i64;
    let mut seen = 0i64;
    let mut factors: Vec<TwistedFactor> = vec![];
    for &(g, inv) in &w1.0 {
        let base = if !inv {
            e.simple_member(g)
        } else {
            seen += 1;
            let ws = sys.mul(&lat.ctx.w, &sys.gens()[g]);
            lat.member(&ws).unwrap()
        };
        factors.push(TwistedFactor { twist: -(total_inv - seen), y: base });
    }
    // manual normalize with timers
    let (mut t_conj, mut t_rc, mut t_meet, mut t_prod) =
        (Duration::ZERO, Duration::ZERO, Duration::ZERO, Duration::ZERO);
    let (mut n_meet, mut n_slide) = (0u64, 0u64);
    let mut p = -total_inv;
    let mut f: Vec<TwistedFactor> = vec![];
    for x in factors {
        match x.y.rank {
            0 => {}
            3 => { p += 1; for y in f.iter_mut() { y.twist += 1; } }
            _ => {
                let j = lat.window_exponent_of(&x.y).unwrap();
                let z = lat.conjugate_member(&x.y, j).unwrap();
                f.push(TwistedFactor { twist: x.twist - j, y: z });
            }
        }
    }
    let mut dirty: std::collections::VecDeque<usize> = (0..f.len()).collect();
    while let Some(i) = dirty.pop_front() {
        if i + 1 >= f.len() { continue; }
        let t0 = Instant::now();
        let d = f[i + 1].twist - f[i].twist;
        let y2s = lat.conjugate_member(&f[i + 1].y, d).unwrap();
        t_conj += t0.elapsed();
        let t0 = Instant::now();
        let rc = lat.right_complement_unchecked(&f[i].y).unwrap();
        t_rc += t0.elapsed();
        let t0 = Instant::now();
        let m = lat.meet(&rc, &y2s).unwrap();
        t_meet += t0.elapsed();
        n_meet += 1;
        if m.rank == 0 { continue; }
        n_slide += 1;
        let t0 = Instant::now();
        let xm = sys.mul(&f[i].y.element, &m.element);
        let my = sys.mul(&sys.inverse(&m.element), &y2s.element);
        let tail_rank = f[i + 1].y.rank - m.rank;
        let base_twist = f[i].twist;
        let new_rank = f[i].y.rank + m.rank;
        if new_rank == 3 {
            p += 1;
            for y in f.iter_mut().take(i) { y.twist += 1; }
            let tail = lat.member(&my).ok();
            f.remove(i);
            match tail {
                Some(t) if t.rank > 0 => { f[i] = TwistedFactor { twist: base_twist, y: t }; }
                _ => { if tail_rank == 0 { f.remove(i); } }
            }
            dirty.clear();
            for k in 0..f.len() { dirty.push_back(k); }
            t_prod += t0.elapsed();
            continue;
        }
        let head = lat.member(&xm).unwrap();
        let jh = lat.window_exponent_of(&head).unwrap();
        let zh = lat.conjugate_member(&head, jh).unwrap();
        f[i] = TwistedFactor { twist: base_twist - jh, y: zh };
        if tail_rank == 0 {
            f.remove(i + 1);
        } else {
            let tail = lat.member(&my).unwrap();
            let jt = lat.window_exponent_of(&tail).unwrap();
            let zt = lat.conjugate_member(&tail, jt).unwrap();
            f[i + 1] = TwistedFactor { twist: base_twist - jt, y: zt };
        }
        t_prod += t0.elapsed();
        if i > 0 { dirty.push_back(i - 1); }
        dirty.push_back(i);
        if i + 1 < f.len() { dirty.push_back(i + 1); }
    }
    println!("meets: {n_meet} ({t_meet:?}), slides: {n_slide} (prod+member {t_prod:?})");
    println!("conjugate: {t_conj:?}, rc: {t_rc:?}");
}
