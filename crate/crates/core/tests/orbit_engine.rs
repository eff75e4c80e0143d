use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specht_core::character::Characters;
use specht_core::field::GaloisField;
use specht_core::flag::FlagSpace;
use specht_core::orbit::*;
use specht_core::pattern::Pattern;

fn space(n: usize, m: usize, q: u64) -> (FlagSpace, Characters) {
    let f = Arc::new(GaloisField::new(q).unwrap());
    (FlagSpace::new(n, m, f.clone(), u64::MAX).unwrap(), Characters::new(f))
}

#[test]
fn monomial_closed_forms_match_direct_expansion() {
    for (n, m, q) in [(4, 2, 2), (4, 2, 3), (5, 2, 2), (3, 1, 3), (5, 1, 2)] {
        let (fs, c) = space(n, m, q);
        for b in 0..fs.batches().len() as u32 {
            if fs.batch(b).dim() > 4 {
                continue;
            }
            let perms = batch_root_permutations(&fs, b);
            monomial_oracle_check(&fs, &c, b, &perms).unwrap();
        }
    }
}

#[test]
fn orbit_sizes_match_exponent_and_stabilizer() {
    for (n, m, q) in [(4, 2, 2), (4, 2, 3), (5, 2, 2), (6, 3, 2)] {
        let (fs, _) = space(n, m, q);
        for b in 0..fs.batches().len() as u32 {
            let batch = fs.batch(b);
            let (keys, records) = batch_orbit_census(&fs, b);
            let total: u64 = records.iter().map(|r| r.size).sum();
            assert_eq!(total, batch.size);
            for r in &records {
                let orbit = orbit_bfs(fs.field(), batch, r.pattern_key);
                assert_eq!(orbit.len() as u64, r.size, "{:?} {:?}", batch.tableau.row2, r.pattern);
                assert_eq!(r.size, q.pow(r.exponent as u32));
                let p = r.pattern.pattern();
                let st = stabilizer_generators(&batch.tableau, &p).unwrap();
                assert_eq!(st.orbit_exponent(), r.exponent, "{:?} {:?}", batch.tableau.row2, p);
                let pm: Vec<_> = orbit.iter().filter(|&&k| is_pattern_matrix(batch, &batch.digits(k))).collect();
                assert_eq!(pm, vec![&r.pattern_key]);
                for &k in &orbit {
                    assert_eq!(keys[k as usize], r.pattern_key);
                }
            }
            // (q-1)^s orbits per fitting pattern
            for p in Pattern::all_fitting(&batch.tableau) {
                let count = records.iter().filter(|r| r.pattern.pattern() == p).count() as u64;
                assert_eq!(count, (q - 1).pow(p.len() as u32));
            }
        }
    }
}

#[test]
fn u_invariance_and_cyclic_generation_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, m, q) in [(4, 2, 2), (4, 2, 3), (5, 2, 2)] {
        let (fs, c) = space(n, m, q);
        let census = OrbitCensus::new(&fs);
        for b in 0..fs.batches().len() as u32 {
            let perms = batch_root_permutations(&fs, b);
            for (i, r) in census.orbits.iter().enumerate().filter(|(_, r)| r.batch == b) {
                let members = census.members(i);
                check_u_invariance(&fs, &c, &members, &perms).unwrap();
                check_cyclic_generation(&fs, &c, r, &members, &mut rng).unwrap();
            }
        }
    }
}
