use proptest::prelude::*;

use mclex::closure::{check_tableau, closure, decide, implies, ColumnSet, ColumnUniverse};
use mclex::degeneracy::{is_anti_trivial, is_trivial};
use mclex::localization::loc_equal;
use mclex::matrix::{Entry, ExtendedMatrix};
use mclex::oracle::{
    engine_reflection, is_functional, reflect, set_star_has_closed_relations, ConcreteRelation, PointedSet,
};

fn matrix(rows: usize, cols: usize, vars: u8) -> impl Strategy<Value = ExtendedMatrix> {
    (1..=rows, 0..=cols).prop_flat_map(move |(n, m)| {
        prop::collection::vec(prop::collection::vec(0..=vars, m + 1), n).prop_map(move |grid| {
            let rows: Vec<Vec<Entry>> = grid
                .iter()
                .map(|r| r.iter().map(|&c| Entry::from_code(c)).collect())
                .collect();
            ExtendedMatrix::from_rows(&rows, vars as usize).unwrap()
        })
    })
}

fn one(m: &ExtendedMatrix) -> Vec<ExtendedMatrix> {
    vec![m.clone()]
}

fn column_set(u: &ColumnUniverse, bits: u64) -> ColumnSet {
    let mut s = ColumnSet::with_star(u.size());
    for c in 0..u.size().min(64) {
        if bits >> c & 1 == 1 {
            s.insert(c as u32);
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_is_idempotent_and_keeps_the_class(a in matrix(3, 3, 2)) {
        let n = a.normalize();
        prop_assert_eq!(n.normalize(), n.clone());
        prop_assert!(implies(&one(&a), &one(&n)).unwrap());
        prop_assert!(implies(&one(&n), &one(&a)).unwrap());
        prop_assert_eq!(is_trivial(&a), is_trivial(&n));
        prop_assert_eq!(is_anti_trivial(&a), is_anti_trivial(&n));
    }

    #[test]
    fn closure_is_a_closure_operator(h in matrix(3, 3, 2), x in any::<u64>(), y in any::<u64>()) {
        let u = ColumnUniverse::new(2, 2).unwrap();
        let s = one(&h);
        let a = column_set(&u, x);
        let b = column_set(&u, x | y);
        let ca = closure(&s, &u, &a).unwrap();
        let cb = closure(&s, &u, &b).unwrap();
        prop_assert!(a.is_subset(&ca));
        prop_assert_eq!(closure(&s, &u, &ca).unwrap(), ca.clone());
        prop_assert!(ca.is_subset(&cb));
    }

    #[test]
    fn implication_is_a_preorder(a in matrix(2, 3, 2), b in matrix(2, 3, 2), c in matrix(2, 3, 2)) {
        prop_assert!(implies(&one(&a), &one(&a)).unwrap());
        let ab = implies(&one(&a), &one(&b)).unwrap();
        let bc = implies(&one(&b), &one(&c)).unwrap();
        if ab && bc {
            prop_assert!(implies(&one(&a), &one(&c)).unwrap());
        }
    }

    #[test]
    fn positive_decisions_carry_valid_tableaux(a in matrix(2, 3, 2), b in matrix(3, 3, 1)) {
        let d = decide(&one(&a), &one(&b)).unwrap();
        for p in &d.tableaux {
            prop_assert_eq!(p.verdict, d.verdict);
            if p.verdict {
                prop_assert!(check_tableau(p).is_ok());
            }
        }
    }

    #[test]
    fn equal_localization_is_an_equivalence(a in matrix(2, 3, 2), b in matrix(2, 3, 2), c in matrix(2, 3, 2)) {
        prop_assert!(loc_equal(&a, &a).unwrap());
        let ab = loc_equal(&a, &b).unwrap();
        prop_assert_eq!(ab, loc_equal(&b, &a).unwrap());
        if ab && loc_equal(&b, &c).unwrap() {
            prop_assert!(loc_equal(&a, &c).unwrap());
        }
    }

    #[test]
    fn degeneracy_agrees_with_brute_force(a in matrix(4, 4, 3)) {
        let two = PointedSet::new(2).unwrap();
        prop_assert_eq!(is_trivial(&a), !is_functional(&a, two));
        prop_assert_eq!(is_anti_trivial(&a), set_star_has_closed_relations(&a));
    }

    #[test]
    fn reflection_agrees_with_the_engine(s in matrix(3, 3, 2), n in matrix(2, 3, 1)) {
        let base = ConcreteRelation::columns_of(&n.tight()).unwrap();
        prop_assert_eq!(reflect(&base, &one(&s)), engine_reflection(&one(&s), &n));
    }
}
