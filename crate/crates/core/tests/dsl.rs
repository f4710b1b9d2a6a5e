use gradef::dsl::eval::{Kind, Value};
use gradef::dsl::session::{example_names, parse_value};
use gradef::dsl::*;
use gradef::fixtures;
use gradef::forms::omega_bracket_raw;
use gradef::grassmann::Grass;
use gradef::scalars::*;
use gradef::Error;

fn session(src: &str) -> Session {
    Session::load(src, &SessionConfig::default()).unwrap()
}

fn text(s: &Session, expr: &str) -> String {
    s.eval_str(expr).unwrap().text()
}

#[test]
fn grammar_examples() {
    let s = session("m = 3\ng = 1\ndegrees = -1");
    let v = s.eval_str("e1 * th1^th2^th3").unwrap();
    assert_eq!(v.kind(), Kind::Pv);
    assert_eq!(v.text(), "1 * e1 * th1^th2^th3");
    assert_eq!(text(&s, "sbr(th1, x1)"), "1");
    assert_eq!(text(&s, "sbr(th1, x1*x2)"), "1 * x2");
    assert_eq!(text(&s, "th2^th1"), "-1 * th1^th2");
    assert_eq!(text(&s, "th1^th1"), "0");
    assert_eq!(text(&s, "e1*e1"), "0");
    assert_eq!(text(&s, "1/2*x1 + 1/2*x1"), "1 * x1");
    assert_eq!(text(&s, "-(x1 - x2)"), text(&s, "x2 - x1"));
    assert_eq!(text(&s, "2 * 3 + 1"), "7");
}

#[test]
fn omega_bracket_matches_forms_module() {
    let s = Session::fixture("standard2").unwrap();
    let v = s.eval_str("obr(s(eps*dx1), s(eps*x1^2))").unwrap();
    let ctx = &s.env.ctx;
    let a = Grass::term(0b01, Poly::eps());
    let b = Grass::scalar(Poly::eps().mul(&Poly::x(0).mul(&Poly::x(0), ctx), ctx));
    let want = omega_bracket_raw(&a, &b, &fixtures::standard2().alpha, ctx);
    assert_eq!(v, Value::SForm(gradef::forms::truncate_form(&want, ctx)));
    assert!(s.eval_str("obr(s(eps*dx1), s(eps*x1))").unwrap().is_zero());
}

#[test]
fn suspension_is_accepted_both_ways() {
    let s = Session::fixture("standard2").unwrap();
    let a = s.eval_str("s(eps*dx1^dx2)").unwrap();
    assert_eq!(a.text(), "s^-1(1 * eps * dx1^dx2)");
    assert_eq!(s.eval_str("s^-1(eps*dx1^dx2)").unwrap(), a);
}

#[test]
fn operator_syntax() {
    let s = session("m = 2");
    assert_eq!(text(&s, "D[1]⊗D[2]"), text(&s, "D[1] & D[2]"));
    assert_eq!(text(&s, "cup(D[1], D[2])"), text(&s, "D[1]⊗D[2]"));
    assert_eq!(text(&s, "2 * D()"), "2 * D()");
    assert_eq!(text(&s, "hoch(D[1])"), "0");
    assert_eq!(text(&s, "gbr(D[1], D[2])"), "0");
    assert_eq!(text(&s, "hkrp(hkr(th1^th2))"), "1 * th1^th2");
    assert_eq!(s.eval_str("Dop[[1,1],[]]").unwrap(), s.eval_str("D[1,1]⊗D[]").unwrap());
    assert_eq!(s.eval_str("D[1,1]⊗D()").unwrap(), s.eval_str("D[1,1]").unwrap());
}

#[test]
fn moyal_prints_in_operator_syntax() {
    let s = session("fixture = standard2\nN = 1");
    let t = text(&s, "moyal()");
    assert_eq!(t.matches(" + ").count(), 1, "{t}");
    assert!(t.contains("D[1]⊗D[2]") && t.contains("D[2]⊗D[1]"), "{t}");
    let s = session("fixture = standard2\nN = 2");
    let t = text(&s, "moyal()");
    assert!(t.contains("eps^2"), "{t}");
}

#[test]
fn errors_carry_positions() {
    let s = session("m = 3");
    match s.eval_str("x1 + x4") {
        Err(Error::Parse { line, col, msg }) => {
            assert_eq!((line, col), (1, 6));
            assert!(msg.contains("x4"));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(s.eval_str("sbr(th1)"), Err(Error::Parse { .. })));
    assert!(matches!(s.eval_str("x1 $ x2"), Err(Error::Parse { .. })));
    assert!(matches!(s.eval_str("e1"), Err(Error::Parse { .. })));
    assert!(matches!(s.eval_str("(x1 + x2"), Err(Error::Parse { .. })));
    match Session::load("m = 2\nlet a = x1\nlet b =  x1 + x3", &SessionConfig::default()) {
        Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (3, 15)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn kind_mismatches_are_errors() {
    let s = Session::fixture("standard2").unwrap();
    assert!(s.eval_str("s(eps*dx1) + th1").is_err());
    assert!(s.eval_str("x1^-1").is_err());
    assert!(session("m = 2").eval_str("jw(eps*th1)").is_err());
}

#[test]
fn let_bindings_and_settings() {
    let s = session("# comment\nm = 2\nN = 3\nlet a = eps*x1\nlet b = a*a\nlet mu = b + a");
    assert_eq!(s.env.ctx.n, 3);
    assert_eq!(s.order, vec!["a", "b", "mu"]);
    assert_eq!(s.main_value().unwrap().0, "mu");
    assert_eq!(s.get("b").unwrap().text(), "1 * eps^2 * x1^2");
    let over = SessionConfig { n: Some(1), ..Default::default() };
    let s = Session::load("m = 2\nN = 3\nlet b = eps^2*x1", &over).unwrap();
    assert!(s.get("b").unwrap().is_zero());
}

#[test]
fn fixture_files_match_builtin_pairs() {
    for f in ["standard2", "standard4", "shear4"] {
        let s = Session::fixture(f).unwrap();
        assert_eq!(s.env.pair.as_ref().unwrap(), &fixtures::by_name(f).unwrap(), "{f}");
    }
    assert!(Session::fixture("nope").is_err());
}

#[test]
fn examples_round_trip() {
    for ex in example_names() {
        let s = load_example(ex, &SessionConfig::default()).unwrap();
        for name in &s.order {
            let v = &s.env.vars[name];
            let back = parse_value(&v.text(), v.kind(), &s.env).unwrap();
            assert_eq!(&back, v, "{ex}: {name}");
        }
    }
}

#[test]
fn example_values() {
    let s = load_example("penkava-schwarz", &SessionConfig::default()).unwrap();
    assert_eq!(s.main_value().unwrap().1.text(), "1 * e1 * D[1]⊗D[2]⊗D[3]");
    let s = load_example("moyal-r2", &SessionConfig::default()).unwrap();
    assert_eq!(s.main_value().unwrap().1, &s.eval_str("moyal()").unwrap());
    let s = load_example("moyal-r4", &SessionConfig::default()).unwrap();
    assert_eq!(s.main_value().unwrap().1, &s.eval_str("moyal()").unwrap());
}

#[test]
fn scalars_coerce() {
    let s = Session::fixture("standard2").unwrap();
    let v = s.eval_str("eps * x1").unwrap();
    assert_eq!(v.clone().coerce(Kind::Pv).unwrap().kind(), Kind::Pv);
    assert_eq!(v.clone().coerce(Kind::Form).unwrap().kind(), Kind::Form);
    assert!(v.coerce(Kind::Op).is_none());
    assert_eq!(parse_value("0", Kind::SForm, &s.env).unwrap().kind(), Kind::SForm);
}
