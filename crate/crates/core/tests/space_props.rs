mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use corrpoly::space::{embed_cylinder, independent_product, marginalize};
use corrpoly::{Event, IndexSet, Marginal};

const SHAPES: [&[usize]; 4] = [&[2, 3], &[2, 2, 2], &[3, 2, 2], &[2, 2, 2, 2]];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginalizing_everything_is_identity(seed in any::<u64>(), shape in 0usize..4) {
        let mut g = rng(seed);
        let cs = random_cs(&mut g, SHAPES[shape]);
        let p = random_member(&cs, &mut g);
        let all = IndexSet::all(cs.space().arity());
        let m = marginalize(&p, &all).unwrap();
        prop_assert_eq!(m.weights(), p.weights());
    }

    #[test]
    fn products_factorize(seed in any::<u64>(), shape in 0usize..4, pick in any::<u8>()) {
        let mut g = rng(seed);
        let cs = random_cs(&mut g, SHAPES[shape]);
        let n = cs.space().arity();
        let set = IndexSet::new((0..n).filter(|i| pick >> i & 1 == 1));
        prop_assume!(!set.is_empty());
        let sub = cs.space().subspace(&set).unwrap();
        let local: Vec<Marginal> = set
            .iter()
            .enumerate()
            .map(|(j, i)| Marginal::new(j, cs.marginals()[i].weights().to_vec()).unwrap())
            .collect();
        let expected = independent_product(&sub, &local).unwrap();
        let m = marginalize(cs.independent_product(), &set).unwrap();
        prop_assert_eq!(m.weights(), expected.weights());
    }

    #[test]
    fn cylinders_of_disjoint_sets_intersect_as_products(seed in any::<u64>(), shape in 0usize..4) {
        let mut g = rng(seed);
        let space = random_cs(&mut g, SHAPES[shape]).space().clone();
        let n = space.arity();
        let split = g.gen_range(1..n);
        let i_set = IndexSet::new(0..split);
        let j_set = IndexSet::new(split..n);
        let (si, sj) = (space.subspace(&i_set).unwrap(), space.subspace(&j_set).unwrap());
        let ei = Event::from_flat(si.clone(), (0..si.total_size()).filter(|_| g.gen_bool(0.5))).unwrap();
        let ej = Event::from_flat(sj.clone(), (0..sj.total_size()).filter(|_| g.gen_bool(0.5))).unwrap();
        let lhs = embed_cylinder(&ei, &i_set, &space).unwrap().intersection(&embed_cylinder(&ej, &j_set, &space).unwrap());
        let nj = sj.total_size();
        // I = {0..split} comes first, so E_I × E_J is a row-major block product
        let product = Event::from_flat(
            space.clone(),
            ei.members().iter().flat_map(|&a| ej.members().iter().map(move |&b| a * nj + b)).collect::<Vec<_>>(),
        )
        .unwrap();
        prop_assert_eq!(lhs.members(), product.members());
    }
}
