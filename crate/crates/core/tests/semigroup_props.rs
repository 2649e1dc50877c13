use lpgpd::bitset::BitSet;
use lpgpd::groupoid::generate_slice_semigroup;
use lpgpd::representation::integrate;
use lpgpd::sample;
use lpgpd::semigroup::{is_tight_semilattice, is_tight_spatial, rho_from_pi, Semilattice, SemilatticeRep};
use lpgpd::Slice;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A semilattice of subsets of `{0..m}` closed under intersection, with
/// `β` the inclusion into the power set.
fn random_set_semilattice(rng: &mut ChaCha8Rng, m: usize) -> SemilatticeRep {
    let mut sets: Vec<u32> = vec![0];
    for _ in 0..rng.gen_range(1..=5) {
        sets.push(rng.gen_range(1..1u32 << m));
    }
    loop {
        let mut grown = sets.clone();
        for &a in &sets {
            for &b in &sets {
                if !grown.contains(&(a & b)) {
                    grown.push(a & b);
                }
            }
        }
        if grown.len() == sets.len() {
            break;
        }
        sets = grown;
    }
    sets.sort_unstable();
    sets.dedup();
    let pos = |s: u32| sets.iter().position(|&x| x == s).unwrap();
    let meet = sets.iter().map(|&a| sets.iter().map(|&b| pos(a & b)).collect()).collect();
    let labels = sets.iter().map(|s| format!("{s:b}")).collect();
    let lattice = Semilattice::new(labels, meet, 0).unwrap();
    let images = sets.iter().map(|&s| BitSet::from_indices(m, (0..m).filter(|i| s >> i & 1 == 1))).collect();
    SemilatticeRep::new(lattice, m, images).unwrap()
}

/// A Boolean homomorphism from the algebra on `k` atoms: each point of the
/// universe goes under one atom.
fn random_boolean_hom(rng: &mut ChaCha8Rng, k: usize) -> SemilatticeRep {
    let m = rng.gen_range(k..=k + 3);
    let owner: Vec<usize> = (0..m).map(|u| if u < k { u } else { rng.gen_range(0..k) }).collect();
    let images = (0..1usize << k).map(|a| BitSet::from_indices(m, (0..m).filter(|&u| a >> owner[u] & 1 == 1))).collect();
    SemilatticeRep::new(Semilattice::boolean_algebra(k), m, images).unwrap()
}

fn random_dense_subsemilattice(rng: &mut ChaCha8Rng, e: &Semilattice) -> Option<Vec<usize>> {
    let mut f: Vec<usize> = vec![e.zero()];
    f.extend((0..e.len()).filter(|_| rng.gen_bool(0.5)));
    f.extend(e.atoms());
    loop {
        let mut grown = f.clone();
        for &a in &f {
            for &b in &f {
                let m = e.meet(a, b);
                if !grown.contains(&m) {
                    grown.push(m);
                }
            }
        }
        if grown.len() == f.len() {
            break;
        }
        f = grown;
    }
    e.is_dense(&f).then_some(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tightness_passes_to_dense_subsemilattices(seed in any::<u64>(), boolean in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = if boolean {
            let k = rng.gen_range(1..=3);
            random_boolean_hom(&mut rng, k)
        } else {
            random_set_semilattice(&mut rng, 4)
        };
        prop_assume!(beta.source().len() <= 16);
        let tight = is_tight_semilattice(&beta, 16).unwrap().tight;
        if boolean {
            prop_assert!(tight);
        }
        if let Some(f) = random_dense_subsemilattice(&mut rng, beta.source()) {
            let restricted = beta.restrict(&f).unwrap();
            if tight {
                prop_assert!(is_tight_semilattice(&restricted, 16).unwrap().tight);
            }
        }
    }

    #[test]
    fn integrated_forms_give_tight_nondegenerate_semigroup_reps(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sg = sample::groupoid(&mut rng, 12, 8);
        let g = &sg.groupoid;
        let mu = sample::measure::<f64, _>(&mut rng, &sg, true);
        let r = sample::representation(&mut rng, &sg, &mu, 2.5).unwrap();
        let gens: Vec<Slice> = g.arrows().map(Slice::singleton).collect();
        let sigma = generate_slice_semigroup(g, &gens, 1024).unwrap();
        prop_assert!(sigma.semigroup().validate().violations.is_empty());
        let rho = rho_from_pi(|f| Ok(integrate(&r, f)?.operator), &sigma).unwrap();
        prop_assert!(rho.violations(1e-10).is_empty());
        let report = is_tight_spatial(&rho, 64).unwrap();
        prop_assert!(report.tight);
        prop_assert_eq!(report.essential_support, (0..rho.space().dim()).collect::<Vec<_>>());
    }
}
