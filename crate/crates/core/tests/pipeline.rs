use padic_heisenberg::brackets::bracket_lift;
use padic_heisenberg::expr::parse_state;
use padic_heisenberg::modforms::{
    eisenstein, eisenstein_star_series, quasimodular_fit, KummerChain,
};
use padic_heisenberg::onepoint::{
    graded_check, series_limit, z_function_with, z_limit, TraceRoute,
};
use padic_heisenberg::spectral::eisenstein_matched_state;
use padic_heisenberg::{Exec, NormValue, Prime, Scalar};

#[test]
fn parsed_states_land_in_quasimodular_forms() {
    let a = parse_state("h[-1]^2 vac", 30).unwrap();
    let z = z_function_with(&a, 16, TraceRoute::Matrix, Exec::Parallel);
    assert_eq!(z, eisenstein(2, 16).unwrap().scale(&Scalar::new(-1, 12)));

    let b = parse_state("h[-3] h[-1] vac", 30).unwrap();
    let z = z_function_with(&b, 16, TraceRoute::Wick, Exec::Parallel);
    assert_eq!(z, eisenstein(4, 16).unwrap().scale(&Scalar::new(1, 240)));

    let report = graded_check(&parse_state("h(-2)^2 h(-1)^2 vac", 30).unwrap(), 20).unwrap();
    assert_eq!(report.residual_zero, Some(true));
    let fit = report.fit.unwrap();
    assert_eq!(fit.weight, 6);
    assert_eq!(fit.monomials.len(), 3);
}

#[test]
fn odd_lifted_states_have_vanishing_traces() {
    for text in ["h(-3) vac", "h(-2) h(-1)^3 vac", "h(-1)^3 vac", "h(-5) vac"] {
        let v = parse_state(text, 30).unwrap();
        let z = z_function_with(
            &bracket_lift(&v).unwrap(),
            12,
            TraceRoute::Wick,
            Exec::Sequential,
        );
        assert!(z.is_zero(), "{text}");
    }
}

#[test]
fn matched_chain_images_converge_to_e_star() {
    let p = Prime::new(3).unwrap();
    let chain = KummerChain::new(p, vec![4, 10, 28]).unwrap();
    let states: Vec<_> = chain
        .weights()
        .iter()
        .map(|&k| eisenstein_matched_state(k).unwrap())
        .collect();
    let zl = z_limit(&states, 6, p).unwrap();
    assert_eq!(
        zl.state_gaps,
        [NormValue::p_pow_neg(p, 2), NormValue::p_pow_neg(p, 3)]
    );
    assert_eq!(zl.series, eisenstein(28, 6).unwrap());
    let images: Vec<_> = states
        .iter()
        .map(|a| z_function_with(a, 6, TraceRoute::Wick, Exec::Sequential))
        .collect();
    for (img, &k) in images.iter().zip(chain.weights()) {
        assert_eq!(*img, eisenstein(k, 6).unwrap());
    }
    let limit = series_limit(&images, p, 2).unwrap();
    let star = eisenstein_star_series(&chain, 6, 2, Exec::Sequential).unwrap();
    let star: Vec<String> = star.iter().map(|c| c.residue.to_string()).collect();
    assert_eq!(limit.residues, star);
}

#[test]
fn weight_eight_fit_needs_three_monomials() {
    let v = parse_state("h(-4)^2 vac", 30).unwrap();
    let z = z_function_with(
        &bracket_lift(&v).unwrap(),
        20,
        TraceRoute::Matrix,
        Exec::Parallel,
    );
    let fit = quasimodular_fit(&z, 8, 20).unwrap();
    assert!(fit.exact);
    // a window below dim + margin is refused
    assert!(quasimodular_fit(&z, 8, 6).is_err());
}
