//! Extended Butcher tableaux for multiderivative Runge-Kutta schemes.
//!
//! A tableau with `r` derivatives and `s` stages carries one `s×s` coefficient
//! matrix and one weight row per derivative, plus the abscissae `c`:
//!
//! ```text
//!  c | A(1) | ... | A(r)
//! ---+------+-----+------
//!    | b(1) | ... | b(r)
//! ```

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const CONSISTENCY_TOL: f64 = 1e-12;

/// Sparsity class of the coefficient matrices, which decides how stages can be solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    SingleStage,
    DiagonallyImplicit,
    ExplicitFirstStageFullyImplicit,
    FullyImplicit,
}

impl Structure {
    pub fn as_str(self) -> &'static str {
        match self {
            Structure::SingleStage => "SingleStage",
            Structure::DiagonallyImplicit => "DiagonallyImplicit",
            Structure::ExplicitFirstStageFullyImplicit => "ExplicitFirstStageFullyImplicit",
            Structure::FullyImplicit => "FullyImplicit",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SingleStage" => Ok(Structure::SingleStage),
            "DiagonallyImplicit" => Ok(Structure::DiagonallyImplicit),
            "ExplicitFirstStageFullyImplicit" => Ok(Structure::ExplicitFirstStageFullyImplicit),
            "FullyImplicit" => Ok(Structure::FullyImplicit),
            other => Err(Error::InvalidParameters(format!(
                "unknown tableau structure `{other}`"
            ))),
        }
    }
}

/// An immutable extended Butcher tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau {
    name: String,
    q: usize,
    a: Vec<DMatrix<f64>>,
    b: Vec<DVector<f64>>,
    c: DVector<f64>,
    structure: Structure,
}

impl Tableau {
    /// Builds a tableau, checking only shapes. Use [`Tableau::validate`] for the
    /// consistency conditions.
    pub fn new(
        name: impl Into<String>,
        q: usize,
        a: Vec<DMatrix<f64>>,
        b: Vec<DVector<f64>>,
        c: DVector<f64>,
        structure: Structure,
    ) -> Result<Self> {
        let s = c.len();
        if a.is_empty() || s == 0 || q == 0 {
            return Err(Error::InvalidParameters(
                "tableau needs r ≥ 1, s ≥ 1 and q ≥ 1".into(),
            ));
        }
        if a.len() != b.len() {
            return Err(Error::InvalidParameters(format!(
                "{} coefficient matrices but {} weight rows",
                a.len(),
                b.len()
            )));
        }
        for (k, (ak, bk)) in a.iter().zip(&b).enumerate() {
            if ak.nrows() != s || ak.ncols() != s {
                return Err(Error::InvalidParameters(format!(
                    "A({}) is {}×{}, expected {s}×{s}",
                    k + 1,
                    ak.nrows(),
                    ak.ncols()
                )));
            }
            if bk.len() != s {
                return Err(Error::InvalidParameters(format!(
                    "b({}) has length {}, expected {s}",
                    k + 1,
                    bk.len()
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            q,
            a,
            b,
            c,
            structure,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of derivatives `r`.
    pub fn derivatives(&self) -> usize {
        self.a.len()
    }

    /// Number of stages `s`.
    pub fn stages(&self) -> usize {
        self.c.len()
    }

    /// Advertised consistency order `q`.
    pub fn order(&self) -> usize {
        self.q
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    /// Coefficient `a^{(k)}_{lν}` with `k` 1-based and `l`, `nu` 0-based.
    pub fn a(&self, k: usize, l: usize, nu: usize) -> f64 {
        self.a[k - 1][(l, nu)]
    }

    /// Weight `b^{(k)}_l` with `k` 1-based.
    pub fn b(&self, k: usize, l: usize) -> f64 {
        self.b[k - 1][l]
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a_matrix(&self, k: usize) -> &DMatrix<f64> {
        &self.a[k - 1]
    }

    pub fn b_row(&self, k: usize) -> &DVector<f64> {
        &self.b[k - 1]
    }

    /// True when no stage depends on a later one, in every coefficient matrix.
    pub fn is_lower_triangular(&self) -> bool {
        let s = self.stages();
        self.a
            .iter()
            .all(|ak| (0..s).all(|l| (l + 1..s).all(|nu| ak[(l, nu)] == 0.0)))
    }

    /// True when stage `l` only references earlier stages.
    pub fn stage_is_explicit(&self, l: usize) -> bool {
        let s = self.stages();
        self.a
            .iter()
            .all(|ak| (l..s).all(|nu| ak[(l, nu)] == 0.0))
    }

    /// Number of leading stages that can be evaluated without solving.
    pub fn explicit_prefix(&self) -> usize {
        (0..self.stages())
            .take_while(|&l| self.stage_is_explicit(l))
            .count()
    }

    /// Checks the shape, consistency and structure-tag invariants.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let s = self.stages();
        for (k, ak) in self.a.iter().enumerate() {
            if ak.nrows() != s || ak.ncols() != s {
                violations.push(format!("A({}) is not {s}×{s}", k + 1));
            }
        }
        for (k, bk) in self.b.iter().enumerate() {
            if bk.len() != s {
                violations.push(format!("b({}) does not have length {s}", k + 1));
            }
        }
        if !violations.is_empty() {
            return violations;
        }

        let a1 = &self.a[0];
        for l in 0..s {
            let row_sum: f64 = a1.row(l).iter().sum();
            if (row_sum - self.c[l]).abs() > CONSISTENCY_TOL {
                violations.push(format!(
                    "Σ A(1) row {} = {} ≠ c = {}",
                    l + 1,
                    row_sum,
                    self.c[l]
                ));
            }
        }
        let b_sum: f64 = self.b[0].iter().sum();
        if (b_sum - 1.0).abs() > CONSISTENCY_TOL {
            violations.push(format!("Σ b^(1) = {b_sum} ≠ 1"));
        }

        match self.structure {
            Structure::SingleStage => {
                if s != 1 {
                    violations.push(format!("SingleStage tableau has {s} stages"));
                }
            }
            Structure::DiagonallyImplicit => {
                if !self.is_lower_triangular() {
                    violations.push(
                        "DiagonallyImplicit tableau has nonzero entries above the diagonal".into(),
                    );
                }
            }
            Structure::ExplicitFirstStageFullyImplicit => {
                if self.a.iter().any(|ak| ak.row(0).iter().any(|&x| x != 0.0)) {
                    violations.push(
                        "ExplicitFirstStageFullyImplicit tableau has a nonzero first row".into(),
                    );
                }
            }
            Structure::FullyImplicit => {}
        }
        violations
    }

    /// Writes the tableau in the plain-text exchange format read by [`Tableau::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {}\n",
            self.name,
            self.derivatives(),
            self.stages(),
            self.q,
            self.structure
        );
        let row = |v: &mut dyn Iterator<Item = f64>| {
            v.map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
        };
        for ak in &self.a {
            for l in 0..self.stages() {
                out.push_str(&row(&mut ak.row(l).iter().copied()));
                out.push('\n');
            }
        }
        for bk in &self.b {
            out.push_str(&row(&mut bk.iter().copied()));
            out.push('\n');
        }
        out.push_str(&row(&mut self.c.iter().copied()));
        out.push('\n');
        out
    }

    /// Parses the plain-text format: a header `name r s q structure`, then `r`
    /// blocks of `s` rows for the matrices, `r` weight rows and one row of
    /// abscissae. Entries may be decimals or `p/q` rationals. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "empty input".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: hline,
                message: "header must be `name r s q structure`".into(),
            });
        }
        let count = |f: &str, what: &str| -> Result<usize> {
            f.parse::<usize>().map_err(|_| Error::Parse {
                line: hline,
                message: format!("invalid {what} `{f}`"),
            })
        };
        let r = count(fields[1], "r")?;
        let s = count(fields[2], "s")?;
        let q = count(fields[3], "q")?;
        let structure: Structure = fields[4].parse().map_err(|e: Error| Error::Parse {
            line: hline,
            message: e.to_string(),
        })?;

        let mut next_row = || -> Result<Vec<f64>> {
            let (ln, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: "unexpected end of input".into(),
            })?;
            let vals = line
                .split_whitespace()
                .map(parse_number)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|message| Error::Parse { line: ln, message })?;
            if vals.len() != s {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("expected {s} entries, found {}", vals.len()),
                });
            }
            Ok(vals)
        };

        let mut a = Vec::with_capacity(r);
        for _ in 0..r {
            let mut rows = Vec::with_capacity(s * s);
            for _ in 0..s {
                rows.extend(next_row()?);
            }
            a.push(DMatrix::from_row_slice(s, s, &rows));
        }
        let mut b = Vec::with_capacity(r);
        for _ in 0..r {
            b.push(DVector::from_vec(next_row()?));
        }
        let c = DVector::from_vec(next_row()?);
        Tableau::new(fields[0], q, a, b, c, structure)
    }
}

fn parse_number(tok: &str) -> std::result::Result<f64, String> {
    if let Some((num, den)) = tok.split_once('/') {
        let n: f64 = num
            .parse()
            .map_err(|_| format!("invalid numerator in `{tok}`"))?;
        let d: f64 = den
            .parse()
            .map_err(|_| format!("invalid denominator in `{tok}`"))?;
        if d == 0.0 {
            return Err(format!("zero denominator in `{tok}`"));
        }
        Ok(n / d)
    } else {
        tok.parse().map_err(|_| format!("invalid number `{tok}`"))
    }
}

/// Exact catalogue entry, converted to floating point once when a tableau is built.
#[derive(Debug, Clone, Copy)]
enum Coef {
    Ratio(i64, i64),
    Decimal(f64),
}

impl Coef {
    fn value(self) -> f64 {
        match self {
            Coef::Ratio(n, d) => n as f64 / d as f64,
            Coef::Decimal(x) => x,
        }
    }
}

const fn q(n: i64, d: i64) -> Coef {
    Coef::Ratio(n, d)
}

const Z: Coef = Coef::Ratio(0, 1);

/// Tableau whose weight rows repeat the last stage row (stiffly accurate layout).
fn stiffly_accurate(
    name: &str,
    order: usize,
    structure: Structure,
    c: &[Coef],
    a: &[&[Coef]],
) -> Tableau {
    let s = c.len();
    let a_mats: Vec<DMatrix<f64>> = a
        .iter()
        .map(|entries| {
            assert_eq!(entries.len(), s * s);
            DMatrix::from_row_iterator(s, s, entries.iter().map(|x| x.value()))
        })
        .collect();
    let b = a_mats
        .iter()
        .map(|m| m.row(s - 1).transpose().into_owned())
        .collect();
    let c = DVector::from_iterator(s, c.iter().map(|x| x.value()));
    Tableau::new(name, order, a_mats, b, c, structure).expect("catalogue tableau is well-shaped")
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `r`-derivative explicit Taylor method as a one-stage tableau.
pub fn explicit_taylor(r: usize) -> Result<Tableau> {
    if r == 0 {
        return Err(Error::InvalidParameters("Taylor order must be ≥ 1".into()));
    }
    let a = vec![DMatrix::zeros(1, 1); r];
    let b = (1..=r)
        .map(|k| DVector::from_element(1, 1.0 / factorial(k)))
        .collect();
    Tableau::new(
        format!("ExplTaylor-{r}"),
        r,
        a,
        b,
        DVector::from_element(1, 0.0),
        Structure::SingleStage,
    )
}

/// `r`-derivative implicit Taylor method: coefficients `(-1)^{k+1}/k!`.
pub fn implicit_taylor(r: usize) -> Result<Tableau> {
    if r == 0 {
        return Err(Error::InvalidParameters("Taylor order must be ≥ 1".into()));
    }
    let coef = |k: usize| {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sign / factorial(k)
    };
    let a = (1..=r)
        .map(|k| DMatrix::from_element(1, 1, coef(k)))
        .collect();
    let b = (1..=r).map(|k| DVector::from_element(1, coef(k))).collect();
    Tableau::new(
        format!("ImplTaylor-{r}"),
        r,
        a,
        b,
        DVector::from_element(1, 1.0),
        Structure::SingleStage,
    )
}

/// Names accepted by [`builtin_tableau`]; Taylor families accept any `r ≥ 1`.
pub const BUILTIN_NAMES: &[&str] = &[
    "ExplTaylor-r",
    "ImplTaylor-r",
    "HB-I2DRK4-2s",
    "HB-I2DRK6-3s",
    "HB-I2DRK8-4s",
    "HB-I3DRK6-2s",
    "HB-I3DRK9-3s",
    "HB-I4DRK8-2s",
    "SSP-I2DRK3-2s",
    "SSP-I2DRK4-5s",
];

/// Looks up a scheme from the built-in catalogue.
#[rustfmt::skip]
pub fn builtin_tableau(name: &str) -> Result<Tableau> {
    use Structure::*;
    let unknown = || Error::UnknownScheme {
        name: name.to_string(),
        available: BUILTIN_NAMES.join(", "),
    };
    if let Some(r) = name.strip_prefix("ExplTaylor-") {
        return explicit_taylor(r.parse().map_err(|_| unknown())?);
    }
    if let Some(r) = name.strip_prefix("ImplTaylor-") {
        return implicit_taylor(r.parse().map_err(|_| unknown())?);
    }
    let efsfi = ExplicitFirstStageFullyImplicit;
    let t = match name {
        "HB-I2DRK4-2s" => stiffly_accurate(
            name,
            4,
            efsfi,
            &[Z, q(1, 1)],
            &[
                &[Z, Z, q(1, 2), q(1, 2)],
                &[Z, Z, q(1, 12), q(-1, 12)],
            ],
        ),
        "HB-I2DRK6-3s" => stiffly_accurate(
            name,
            6,
            efsfi,
            &[Z, q(1, 2), q(1, 1)],
            &[
                &[
                    Z, Z, Z,
                    q(101, 480), q(8, 30), q(55, 2400),
                    q(7, 30), q(16, 30), q(7, 30),
                ],
                &[
                    Z, Z, Z,
                    q(65, 4800), q(-25, 600), q(-25, 8000),
                    q(5, 300), Z, q(-5, 300),
                ],
            ],
        ),
        "HB-I2DRK8-4s" => stiffly_accurate(
            name,
            8,
            efsfi,
            &[Z, q(1, 3), q(2, 3), q(1, 1)],
            &[
                &[
                    Z, Z, Z, Z,
                    q(6893, 54432), q(313, 2016), q(89, 2016), q(397, 54432),
                    q(223, 1701), q(20, 63), q(13, 63), q(20, 1701),
                    q(31, 224), q(81, 224), q(81, 224), q(31, 224),
                ],
                &[
                    Z, Z, Z, Z,
                    q(1283, 272160), q(-851, 30240), q(-269, 30240), q(-163, 272160),
                    q(43, 8505), q(-16, 945), q(-19, 945), q(-8, 8505),
                    q(19, 3360), q(-9, 1120), q(9, 1120), q(-19, 3360),
                ],
            ],
        ),
        "HB-I3DRK6-2s" => stiffly_accurate(
            name,
            6,
            efsfi,
            &[Z, q(1, 1)],
            &[
                &[Z, Z, q(1, 2), q(1, 2)],
                &[Z, Z, q(1, 10), q(-1, 10)],
                &[Z, Z, q(1, 120), q(1, 120)],
            ],
        ),
        "HB-I3DRK9-3s" => stiffly_accurate(
            name,
            9,
            efsfi,
            &[Z, q(1, 2), q(1, 1)],
            &[
                &[
                    Z, Z, Z,
                    q(5669, 26880), q(32, 105), q(-421, 26880),
                    q(41, 210), q(64, 105), q(41, 210),
                ],
                &[
                    Z, Z, Z,
                    q(303, 17920), q(-1, 32), q(47, 17920),
                    q(1, 70), Z, q(-1, 70),
                ],
                &[
                    Z, Z, Z,
                    q(169, 322560), q(1, 315), q(-41, 322560),
                    q(1, 2520), q(2, 315), q(1, 2520),
                ],
            ],
        ),
        "HB-I4DRK8-2s" => stiffly_accurate(
            name,
            8,
            efsfi,
            &[Z, q(1, 1)],
            &[
                &[Z, Z, q(1, 2), q(1, 2)],
                &[Z, Z, q(3, 28), q(-3, 28)],
                &[Z, Z, q(1, 84), q(1, 84)],
                &[Z, Z, q(1, 1680), q(-1, 1680)],
            ],
        ),
        "SSP-I2DRK3-2s" => stiffly_accurate(
            name,
            3,
            DiagonallyImplicit,
            &[Z, q(1, 1)],
            &[
                &[Z, Z, Z, q(1, 1)],
                &[q(-1, 6), Z, q(-1, 6), q(-1, 3)],
            ],
        ),
        "SSP-I2DRK4-5s" => {
            use Coef::Decimal as d;
            let w1 = [
                d(0.060653001401867),
                d(0.020022818960029),
                d(0.102668776898047),
                d(0.191388711018110),
            ];
            let w2 = [
                d(-0.016311560509453),
                d(-0.029325895786881),
                d(-0.036459667895230),
                d(-0.161628266349058),
            ];
            stiffly_accurate(
                name,
                4,
                DiagonallyImplicit,
                &[
                    d(0.660949255604937),
                    d(0.903150646005785),
                    d(2.020339810245656),
                    d(0.374733308278053),
                    d(1.000000000000000),
                ],
                &[
                    &[
                        d(0.660949255604937), Z, Z, Z, Z,
                        d(0.660949255604937), d(0.242201390400848), Z, Z, Z,
                        d(0.660949255604937), d(0.221847558352979), d(1.137542996287740), Z, Z,
                        w1[0], w1[1], w1[2], w1[3], Z,
                        w1[0], w1[1], w1[2], w1[3], d(0.625266691721946),
                    ],
                    &[
                        d(-0.177750705279127), Z, Z, Z, Z,
                        d(-0.177750705279127), d(-0.354733903778084), Z, Z, Z,
                        d(-0.177750705279127), d(-0.324923198367868), d(-0.403963513682271), Z, Z,
                        w2[0], w2[1], w2[2], w2[3], Z,
                        w2[0], w2[1], w2[2], w2[3], d(-0.218859021269943),
                    ],
                ],
            )
        }
        _ => return Err(unknown()),
    };
    Ok(t)
}

/// Every fixed-name scheme in the catalogue (Taylor families excluded).
pub fn fixed_catalogue() -> Vec<Tableau> {
    BUILTIN_NAMES
        .iter()
        .filter(|n| !n.ends_with("-r"))
        .map(|n| builtin_tableau(n).expect("catalogue name"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_taylor_three() {
        let t = builtin_tableau("ImplTaylor-3").unwrap();
        assert_eq!(t.stages(), 1);
        assert_eq!(t.derivatives(), 3);
        assert_eq!(t.c()[0], 1.0);
        assert_eq!(t.a(1, 0, 0), 1.0);
        assert_eq!(t.a(2, 0, 0), -0.5);
        assert_eq!(t.a(3, 0, 0), 1.0 / 6.0);
        assert_eq!(t.b(3, 0), 1.0 / 6.0);
        assert_eq!(t.order(), 3);
    }

    #[test]
    fn hb_two_stage_fourth_order() {
        let t = builtin_tableau("HB-I2DRK4-2s").unwrap();
        assert_eq!(t.c().as_slice(), &[0.0, 1.0]);
        assert_eq!((t.a(1, 1, 0), t.a(1, 1, 1)), (0.5, 0.5));
        assert_eq!((t.a(2, 1, 0), t.a(2, 1, 1)), (1.0 / 12.0, -1.0 / 12.0));
        assert_eq!(t.structure(), Structure::ExplicitFirstStageFullyImplicit);
        assert_eq!(t.explicit_prefix(), 1);
    }

    #[test]
    fn forward_euler() {
        let t = builtin_tableau("ExplTaylor-1").unwrap();
        assert_eq!(t.c()[0], 0.0);
        assert_eq!(t.a(1, 0, 0), 0.0);
        assert_eq!(t.b(1, 0), 1.0);
        assert_eq!(t.explicit_prefix(), 1);
    }

    #[test]
    fn catalogue_validates() {
        for t in fixed_catalogue() {
            assert!(t.validate().is_empty(), "{}: {:?}", t.name(), t.validate());
        }
        for r in 1..=6 {
            assert!(implicit_taylor(r).unwrap().validate().is_empty());
            assert!(explicit_taylor(r).unwrap().validate().is_empty());
        }
    }

    #[test]
    fn structure_tags() {
        for t in fixed_catalogue() {
            let expected = if t.name().starts_with("HB") {
                Structure::ExplicitFirstStageFullyImplicit
            } else {
                Structure::DiagonallyImplicit
            };
            assert_eq!(t.structure(), expected, "{}", t.name());
        }
        assert_eq!(
            builtin_tableau("ImplTaylor-4").unwrap().structure(),
            Structure::SingleStage
        );
    }

    #[test]
    fn weight_sum_violation_reported() {
        let t = Tableau::new(
            "broken",
            2,
            vec![DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.5, 0.5])],
            vec![DVector::from_vec(vec![0.5, 0.4])],
            DVector::from_vec(vec![0.0, 1.0]),
            Structure::FullyImplicit,
        )
        .unwrap();
        let v = t.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("Σ b^(1) = 0.9"), "{}", v[0]);
        assert!(v[0].ends_with("≠ 1"));
    }

    #[test]
    fn structure_mismatch_reported() {
        let t = Tableau::new(
            "upper",
            1,
            vec![DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.5])],
            vec![DVector::from_vec(vec![0.5, 0.5])],
            DVector::from_vec(vec![0.5, 1.0]),
            Structure::DiagonallyImplicit,
        )
        .unwrap();
        assert_eq!(t.validate().len(), 1);
    }

    #[test]
    fn unknown_name_lists_registry() {
        let err = builtin_tableau("RK4").unwrap_err().to_string();
        assert!(err.contains("HB-I2DRK4-2s") && err.contains("SSP-I2DRK4-5s"));
        assert!(builtin_tableau("ImplTaylor-x").is_err());
        assert!(builtin_tableau("ImplTaylor-0").is_err());
    }

    #[test]
    fn parses_rationals() {
        let text = "\
# backward Euler with a second derivative
mine 2 1 2 SingleStage
1
-1/2
1
-1/2
1
";
        let t = Tableau::parse(text).unwrap();
        assert_eq!(t.a(2, 0, 0), -0.5);
        assert_eq!(t, implicit_taylor(2).unwrap().renamed("mine"));
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = Tableau::parse("x 1 2 1 FullyImplicit\n0 0\n1/0 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        assert!(Tableau::parse("x 1 1 1 Weird\n1\n1\n1\n").is_err());
        assert!(Tableau::parse("x 1 2 1 FullyImplicit\n0 0\n").is_err());
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        for t in fixed_catalogue() {
            let back = Tableau::parse(&t.to_text()).unwrap();
            assert_eq!(back, t);
        }
    }
}

#[cfg(test)]
impl Tableau {
    fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}
