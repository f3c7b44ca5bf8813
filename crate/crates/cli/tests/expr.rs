use num_complex::Complex64;
use proptest::prelude::*;
use zsk_cli::expr::{EvalError, Expr, Var, Vars};

const CORPUS: [&str; 50] = [
    "1",
    "x",
    "pi",
    "e",
    "-x",
    "--x",
    "x + 1",
    "x - 1 - 2",
    "x - (1 - 2)",
    "2 * x + 3",
    "2 * (x + 3)",
    "x / 2 / 3",
    "x / (2 / 3)",
    "x^2",
    "x^2^3",
    "(x^2)^3",
    "-x^2",
    "(-x)^2",
    "2^-x",
    "2^-(x + 1)",
    "sin(2*pi*x)^2",
    "abs(sin(pi*x))",
    "cos(2 * pi * x)",
    "exp(-x)",
    "log(1 + x)",
    "sqrt(x)",
    "frac(3 * x)",
    "pow(x, 3)",
    "pow(2, x - 1)",
    "1 / (2 + cos(2*pi*x))",
    "x * (1 - x)",
    "exp(sin(2*pi*x)) - 1",
    "sin(x)*cos(x) + sin(x)/cos(x + 1)",
    "0.5",
    "1e-7 * x",
    "1.25E+3",
    "3.0 * -x",
    "x - -x",
    "-(x * 2)",
    "-(x - 1)",
    "(x)",
    "((x + 1))",
    "abs(x - 0.5)^0.5",
    "n1 * n2 / (n1 + n2)^(2 + s)",
    "n1^(-s)",
    "(n1 + 2 * n2)^-s",
    "n1 * n2 * n3 / (n1 + n2 + n3)^(3 + s)",
    "exp(-s * log(n1 + n2))",
    "pow(n4, -s) * n1 / n4",
    "frac(x + pi) * e^x",
];

#[test]
fn corpus_round_trips() {
    for src in CORPUS {
        let e = Expr::parse(src).unwrap_or_else(|err| panic!("{src}: {err}"));
        let printed = e.to_string();
        let again = Expr::parse(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
        assert_eq!(again, e, "{src} -> {printed}");
        assert_eq!(again.to_string(), printed);
    }
}

#[test]
fn corpus_values() {
    let v = |src: &str, x: f64| Expr::parse(src).unwrap().eval_real(&Vars::at_x(x)).unwrap();
    assert_eq!(v("x - 1 - 2", 0.0), -3.0);
    assert_eq!(v("x - (1 - 2)", 0.0), 1.0);
    assert_eq!(v("x^2^3", 2.0), 256.0);
    assert_eq!(v("(x^2)^3", 2.0), 64.0);
    assert_eq!(v("-x^2", 3.0), -9.0);
    assert!((v("sin(2*pi*x)^2", 0.25) - 1.0).abs() < 1e-15);
    assert_eq!(v("frac(3 * x)", 0.5), 0.5);
}

#[test]
fn variables_are_scoped() {
    assert!(Expr::parse_with("n1 + s", &[Var::N(1), Var::S]).is_ok());
    assert!(Expr::parse_with("n2", &[Var::N(1), Var::S]).is_err());
    assert!(Expr::parse_with("s", &[Var::X]).is_err());
}

#[test]
fn complex_domain_errors() {
    let e = Expr::parse("frac(s)").unwrap();
    let vars = Vars::lattice(&[1], Complex64::new(1.0, 1.0));
    assert_eq!(e.eval_complex(&vars), Err(EvalError::Domain(zsk_cli::expr::Func::Frac)));
    let e = Expr::parse("log(n1 - 1)").unwrap();
    assert!(e.eval_complex(&Vars::lattice(&[1], Complex64::new(2.0, 0.0))).is_err());
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0.0f64..1e6).prop_map(Expr::Num),
        Just(Expr::Pi),
        Just(Expr::E),
        Just(Expr::Var(Var::X)),
        (1u8..=4).prop_map(|i| Expr::Var(Var::N(i))),
        Just(Expr::Var(Var::S)),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    use zsk_cli::expr::{BinOp, Func};
    leaf().prop_recursive(6, 48, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        let func = prop_oneof![
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Abs),
            Just(Func::Sqrt),
            Just(Func::Frac),
        ];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Bin(op, Box::new(a), Box::new(b))),
            (func, inner.clone()).prop_map(|(f, a)| Expr::Call(f, vec![a])),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Call(Func::Pow, vec![a, b])),
        ]
    })
}

proptest! {
    #[test]
    fn printing_is_a_parse_fixed_point(e in tree()) {
        let printed = e.to_string();
        let parsed = Expr::parse(&printed).unwrap();
        prop_assert_eq!(&parsed, &e, "{}", printed);
        prop_assert_eq!(Expr::parse(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn evaluation_is_total_or_typed(e in tree(), x in 0.0f64..1.0) {
        match e.eval_real(&Vars::at_x(x)) {
            Ok(v) => prop_assert!(v.is_finite()),
            Err(EvalError::DivisionByZero | EvalError::Domain(_) | EvalError::NonFinite) => {}
        }
    }
}
