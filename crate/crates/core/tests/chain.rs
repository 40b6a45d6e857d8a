use fqrank::algebra::Field;
use fqrank::chain::{hit_zero_bound, positive_path_bound, ChainKind, ChainSpec};
use fqrank::distributions::{uniform_alt_pmf, uniform_rect_pmf, uniform_square_pmf, uniform_sym_pmf, CorankPmf};
use num_rational::BigRational;
use num_traits::Zero;

fn field(q: u64) -> Field {
    Field::new(q).unwrap()
}

#[test]
fn evolution_reproduces_closed_forms() {
    for q in [2u64, 3, 5] {
        let f = field(q);
        let start = CorankPmf::point(f.q(), 0);
        for n in 1..=8 {
            let sym = ChainSpec::symmetric(&f).evolve(&start, n).unwrap();
            assert!(sym.exact_eq(&uniform_sym_pmf(n, &f)), "sym q={q} n={n}");
            if q % 2 == 1 {
                let alt = ChainSpec::alternating(&f).unwrap().evolve(&start, n).unwrap();
                assert!(alt.exact_eq(&uniform_alt_pmf(n, &f).unwrap()), "alt q={q} n={n}");
            }
            let iid = ChainSpec::iid_column(n, &f);
            let square = iid.to_corank(&iid.evolve(&start, n).unwrap());
            assert!(square.exact_eq(&uniform_square_pmf(n, &f)), "iid q={q} n={n}");
            let rect = iid.to_corank(&iid.evolve(&start, n + 2).unwrap());
            assert!(rect.exact_eq(&uniform_rect_pmf(n, 2, &f)), "rect q={q} n={n}");
        }
    }
}

#[test]
fn alternating_parity_flips_each_step() {
    let f = field(5);
    let chain = ChainSpec::alternating(&f).unwrap();
    let mut law = CorankPmf::point(5, 0);
    for step in 1..10 {
        law = chain.evolve(&law, 1).unwrap();
        assert!(law.support().iter().all(|(k, _)| k % 2 == step % 2));
    }
}

#[test]
fn claimed_path_is_the_exhaustive_maximum() {
    for q in [2u64, 3, 5] {
        let f = field(q);
        let mut chains = vec![ChainSpec::symmetric(&f)];
        if q % 2 == 1 {
            chains.push(ChainSpec::alternating(&f).unwrap());
        }
        for chain in &chains {
            for x0 in 1..=4 {
                for steps in 0..=10 {
                    let (path, p) = chain.most_likely_positive_path(x0, steps).unwrap();
                    assert_eq!(path.len(), steps + 1);
                    assert!(path.iter().all(|&k| k >= 1));
                    let (_, best) = chain.max_positive_path_exhaustive(x0, steps).unwrap();
                    assert_eq!(p, best, "{} q={q} x0={x0} steps={steps}", chain.kind);
                    assert!(p <= positive_path_bound(f.q(), x0, steps));
                }
            }
        }
    }
}

#[test]
fn hitting_zero_beats_bound_on_grid() {
    for q in [5u64, 7, 11] {
        let f = field(q);
        for kind in [ChainKind::Symmetric, ChainKind::Alternating] {
            let chain = ChainSpec::new(kind, &f).unwrap();
            for m0 in [1usize, 2, 4] {
                for s in [8usize, 10, 12] {
                    let bound = hit_zero_bound(f.q(), m0, s);
                    if bound > BigRational::zero() {
                        assert!(chain.hit_zero_prob(m0, s) >= bound, "{kind} q={q} m0={m0} s={s}");
                    }
                }
            }
        }
    }
}
