//! Guard predicates over a finite box of integer-valued variables.
//!
//! A [`Predicate`] is the grammar `true | false | x ~ k | !p | p & p`, with
//! `p | q` accepted as surface syntax and stored as `!(!p & !q)`. Value sets,
//! point-to-set distances and Hausdorff distances are computed by exhaustive
//! enumeration of the [`Domain`], which keeps every result exact.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredicateError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown operator `{token}` at byte {position}")]
    UnknownOperator { position: usize, token: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("valuation has {got} components, domain has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
}

/// Ordered variables, each ranging over an inclusive integer interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    variables: Vec<String>,
    ranges: Vec<(i64, i64)>,
}

impl Domain {
    pub fn new<S: Into<String>>(
        vars: impl IntoIterator<Item = (S, i64, i64)>,
    ) -> Result<Self, PredicateError> {
        let mut variables = Vec::new();
        let mut ranges = Vec::new();
        for (name, lo, hi) in vars {
            let name = name.into();
            if lo > hi {
                return Err(PredicateError::InvalidDomain(format!(
                    "variable `{name}` has empty range [{lo}, {hi}]"
                )));
            }
            if variables.contains(&name) {
                return Err(PredicateError::InvalidDomain(format!(
                    "variable `{name}` declared twice"
                )));
            }
            variables.push(name);
            ranges.push((lo, hi));
        }
        if variables.is_empty() {
            return Err(PredicateError::InvalidDomain(
                "at least one variable is required".into(),
            ));
        }
        Ok(Domain { variables, ranges })
    }

    /// The `x in [0, width-1]`, `y in [0, height-1]` domain of a grid.
    pub fn grid(width: usize, height: usize) -> Self {
        Domain {
            variables: vec!["x".into(), "y".into()],
            ranges: vec![(0, width as i64 - 1), (0, height as i64 - 1)],
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn dimension(&self) -> usize {
        self.variables.len()
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    /// Number of valuations in the box.
    pub fn size(&self) -> usize {
        self.ranges
            .iter()
            .map(|(lo, hi)| (hi - lo + 1) as usize)
            .product()
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        v.0.len() == self.dimension()
            && v.0
                .iter()
                .zip(&self.ranges)
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// All valuations in lexicographic order, last variable fastest.
    pub fn valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        let total = self.size();
        (0..total).map(move |mut idx| {
            let mut values = vec![0; self.dimension()];
            for (slot, (lo, hi)) in values.iter_mut().zip(&self.ranges).rev() {
                let span = (hi - lo + 1) as usize;
                *slot = lo + (idx % span) as i64;
                idx /= span;
            }
            Valuation(values)
        })
    }
}

/// One integer per domain variable, in domain order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(pub Vec<i64>);

impl Valuation {
    pub fn new(values: impl Into<Vec<i64>>) -> Self {
        Valuation(values.into())
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Comparator {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Eq => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    True,
    False,
    Atom {
        var: String,
        op: Comparator,
        constant: i64,
    },
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub fn atom(var: impl Into<String>, op: Comparator, constant: i64) -> Self {
        Predicate::Atom {
            var: var.into(),
            op,
            constant,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Predicate) -> Self {
        Predicate::Not(Box::new(p))
    }

    pub fn and(a: Predicate, b: Predicate) -> Self {
        Predicate::And(Box::new(a), Box::new(b))
    }

    /// `a | b`, stored as `!(!a & !b)`.
    pub fn or(a: Predicate, b: Predicate) -> Self {
        Predicate::not(Predicate::and(Predicate::not(a), Predicate::not(b)))
    }

    pub fn satisfies(&self, dom: &Domain, v: &Valuation) -> Result<bool, PredicateError> {
        if v.0.len() != dom.dimension() {
            return Err(PredicateError::DimensionMismatch {
                expected: dom.dimension(),
                got: v.0.len(),
            });
        }
        self.eval(dom, v)
    }

    fn eval(&self, dom: &Domain, v: &Valuation) -> Result<bool, PredicateError> {
        Ok(match self {
            Predicate::True => true,
            Predicate::False => false,
            Predicate::Atom { var, op, constant } => {
                let idx = dom
                    .index_of(var)
                    .ok_or_else(|| PredicateError::UnknownVariable(var.clone()))?;
                op.holds(v.0[idx], *constant)
            }
            Predicate::Not(p) => !p.eval(dom, v)?,
            Predicate::And(a, b) => {
                // Evaluate both sides so unknown variables surface regardless of order.
                let left = a.eval(dom, v)?;
                let right = b.eval(dom, v)?;
                left && right
            }
        })
    }

    /// Checks every atom refers to a variable of `dom`.
    pub fn check_variables(&self, dom: &Domain) -> Result<(), PredicateError> {
        match self {
            Predicate::True | Predicate::False => Ok(()),
            Predicate::Atom { var, .. } => dom
                .index_of(var)
                .map(|_| ())
                .ok_or_else(|| PredicateError::UnknownVariable(var.clone())),
            Predicate::Not(p) => p.check_variables(dom),
            Predicate::And(a, b) => {
                a.check_variables(dom)?;
                b.check_variables(dom)
            }
        }
    }

    pub fn value_set(&self, dom: &Domain) -> Result<ValueSet, PredicateError> {
        self.check_variables(dom)?;
        let mut members = Vec::new();
        for v in dom.valuations() {
            if self.eval(dom, &v)? {
                members.push(v);
            }
        }
        Ok(ValueSet { members })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::True => write!(f, "true"),
            Predicate::False => write!(f, "false"),
            Predicate::Atom { var, op, constant } => {
                write!(f, "{var} {} {constant}", op.symbol())
            }
            Predicate::Not(p) => write!(f, "!({p})"),
            Predicate::And(a, b) => write!(f, "({a}) & ({b})"),
        }
    }
}

impl FromStr for Predicate {
    type Err = PredicateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_predicate(s)
    }
}

/// Valuations satisfying a predicate, in domain enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValueSet {
    members: Vec<Valuation>,
}

impl ValueSet {
    pub fn from_members(members: impl IntoIterator<Item = Valuation>) -> Self {
        let mut members: Vec<_> = members.into_iter().collect();
        members.sort();
        members.dedup();
        ValueSet { members }
    }

    pub fn members(&self) -> &[Valuation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        self.members.iter().any(|m| m == v)
    }

    /// Distance from `v` to the nearest member; infinite for the empty set.
    pub fn distance_to(&self, metric: Metric, v: &Valuation) -> f64 {
        self.members
            .iter()
            .map(|m| metric.distance_unchecked(v, m))
            .fold(f64::INFINITY, f64::min)
    }

    /// Symmetric Hausdorff distance; infinite if either set is empty.
    pub fn hausdorff(&self, other: &ValueSet, metric: Metric) -> f64 {
        if self.is_empty() || other.is_empty() {
            return f64::INFINITY;
        }
        let directed = |from: &ValueSet, to: &ValueSet| {
            from.members
                .iter()
                .map(|a| to.distance_to(metric, a))
                .fold(0.0, f64::max)
        };
        directed(self, other).max(directed(other, self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    #[default]
    Manhattan,
    Euclidean,
    Chebyshev,
}

impl Metric {
    pub fn distance(self, a: &Valuation, b: &Valuation) -> Result<f64, PredicateError> {
        if a.0.len() != b.0.len() {
            return Err(PredicateError::DimensionMismatch {
                expected: a.0.len(),
                got: b.0.len(),
            });
        }
        Ok(self.distance_unchecked(a, b))
    }

    fn distance_unchecked(self, a: &Valuation, b: &Valuation) -> f64 {
        let diffs = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs());
        match self {
            Metric::Manhattan => diffs.sum::<i64>() as f64,
            Metric::Chebyshev => diffs.max().unwrap_or(0) as f64,
            Metric::Euclidean => (diffs.map(|d| d * d).sum::<i64>() as f64).sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Manhattan => "manhattan",
            Metric::Euclidean => "euclidean",
            Metric::Chebyshev => "chebyshev",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "manhattan" => Ok(Metric::Manhattan),
            "euclidean" => Ok(Metric::Euclidean),
            "chebyshev" => Ok(Metric::Chebyshev),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn satisfies(v: &Valuation, psi: &Predicate, dom: &Domain) -> Result<bool, PredicateError> {
    psi.satisfies(dom, v)
}

pub fn value_set(psi: &Predicate, dom: &Domain) -> Result<ValueSet, PredicateError> {
    psi.value_set(dom)
}

pub fn distance(m: Metric, v: &Valuation, v2: &Valuation) -> Result<f64, PredicateError> {
    m.distance(v, v2)
}

/// Value-predicate distance: `min { d(v, v') | v' |= psi }`, infinite when unsatisfiable.
pub fn vpd(v: &Valuation, psi: &Predicate, dom: &Domain, m: Metric) -> Result<f64, PredicateError> {
    if v.0.len() != dom.dimension() {
        return Err(PredicateError::DimensionMismatch {
            expected: dom.dimension(),
            got: v.0.len(),
        });
    }
    Ok(psi.value_set(dom)?.distance_to(m, v))
}

pub fn hausdorff(
    psi1: &Predicate,
    psi2: &Predicate,
    dom: &Domain,
    m: Metric,
) -> Result<f64, PredicateError> {
    Ok(psi1.value_set(dom)?.hausdorff(&psi2.value_set(dom)?, m))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Int(i64),
    Cmp(Comparator),
    Not,
    And,
    Or,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, PredicateError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_ascii_whitespace() => i += 1,
            '(' => {
                tokens.push((start, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((start, Token::RParen));
                i += 1;
            }
            '&' | '|' | '!' | '<' | '>' | '=' => {
                while i < bytes.len() && matches!(bytes[i], b'&' | b'|' | b'!' | b'<' | b'>' | b'=')
                {
                    i += 1;
                }
                let run = &text[start..i];
                // `!` may prefix another operator run only as a negation of a `!`
                // (e.g. `!!p`), so split a leading run of bangs off first.
                if run.chars().all(|c| c == '!') {
                    for k in 0..run.len() {
                        tokens.push((start + k, Token::Not));
                    }
                    continue;
                }
                let tok = match run {
                    "&" => Token::And,
                    "|" => Token::Or,
                    "<" => Token::Cmp(Comparator::Lt),
                    "<=" => Token::Cmp(Comparator::Le),
                    ">" => Token::Cmp(Comparator::Gt),
                    ">=" => Token::Cmp(Comparator::Ge),
                    "==" => Token::Cmp(Comparator::Eq),
                    "&!" => {
                        tokens.push((start, Token::And));
                        tokens.push((start + 1, Token::Not));
                        continue;
                    }
                    "|!" => {
                        tokens.push((start, Token::Or));
                        tokens.push((start + 1, Token::Not));
                        continue;
                    }
                    _ => {
                        return Err(PredicateError::UnknownOperator {
                            position: start,
                            token: run.to_string(),
                        })
                    }
                };
                tokens.push((start, tok));
            }
            c if c.is_ascii_digit() || c == '-' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lexeme = &text[start..i];
                let value = lexeme.parse::<i64>().map_err(|_| PredicateError::Syntax {
                    position: start,
                    message: format!("invalid integer `{lexeme}`"),
                })?;
                tokens.push((start, Token::Int(value)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(PredicateError::Syntax {
                    position: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> PredicateError {
        PredicateError::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        tok
    }

    fn or_expr(&mut self) -> Result<Predicate, PredicateError> {
        let mut lhs = self.and_expr()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let rhs = self.and_expr()?;
            lhs = Predicate::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Predicate, PredicateError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Predicate::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Predicate, PredicateError> {
        if self.peek() == Some(&Token::Not) {
            self.pos += 1;
            return Ok(Predicate::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Predicate, PredicateError> {
        let at = self.offset();
        match self.next() {
            Some(Token::LParen) => {
                let inner = self.or_expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        Err(self.error("expected `)`"))
                    }
                }
            }
            Some(Token::Ident(name)) if name == "true" => Ok(Predicate::True),
            Some(Token::Ident(name)) if name == "false" => Ok(Predicate::False),
            Some(Token::Ident(var)) => {
                let op = match self.next() {
                    Some(Token::Cmp(op)) => op,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error(format!("expected comparison after `{var}`")));
                    }
                };
                match self.next() {
                    Some(Token::Int(constant)) => Ok(Predicate::Atom { var, op, constant }),
                    _ => {
                        self.pos -= 1;
                        Err(self.error("expected integer constant"))
                    }
                }
            }
            Some(_) => Err(PredicateError::Syntax {
                position: at,
                message: "expected `true`, `false`, `(`, `!` or a comparison".into(),
            }),
            None => Err(PredicateError::Syntax {
                position: at,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses the concrete guard syntax. `!` binds tightest, then `&`, then `|`.
pub fn parse_predicate(text: &str) -> Result<Predicate, PredicateError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let pred = parser.or_expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Domain {
        Domain::grid(n, n)
    }

    fn v(x: i64, y: i64) -> Valuation {
        Valuation::new([x, y])
    }

    fn p(s: &str) -> Predicate {
        parse_predicate(s).unwrap()
    }

    #[test]
    fn parses_literals_and_conjunction() {
        assert_eq!(p("true"), Predicate::True);
        assert_eq!(p(" false "), Predicate::False);
        assert_eq!(
            p("(x >= 4) & (y >= 4)"),
            Predicate::and(
                Predicate::atom("x", Comparator::Ge, 4),
                Predicate::atom("y", Comparator::Ge, 4)
            )
        );
    }

    #[test]
    fn disjunction_is_desugared() {
        let expected = Predicate::not(Predicate::and(
            Predicate::not(Predicate::not(Predicate::atom("x", Comparator::Eq, 2))),
            Predicate::not(Predicate::atom("y", Comparator::Lt, 1)),
        ));
        assert_eq!(p("!(x == 2) | (y < 1)"), expected);
    }

    #[test]
    fn precedence() {
        // `&` binds tighter than `|`
        let parsed = p("x < 1 | x > 3 & y == 0");
        let expected = Predicate::or(
            Predicate::atom("x", Comparator::Lt, 1),
            Predicate::and(
                Predicate::atom("x", Comparator::Gt, 3),
                Predicate::atom("y", Comparator::Eq, 0),
            ),
        );
        assert_eq!(parsed, expected);
        assert_eq!(p("!x < 1 & y <= -2"), Predicate::and(
            Predicate::not(Predicate::atom("x", Comparator::Lt, 1)),
            Predicate::atom("y", Comparator::Le, -2),
        ));
        assert_eq!(p("!!true"), Predicate::not(Predicate::not(Predicate::True)));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(
            parse_predicate("x => 3"),
            Err(PredicateError::UnknownOperator { position: 2, .. })
        ));
        assert!(matches!(
            parse_predicate("x != 3"),
            Err(PredicateError::UnknownOperator { .. })
        ));
        assert!(matches!(
            parse_predicate("(x >= 4"),
            Err(PredicateError::Syntax { position: 7, .. })
        ));
        assert!(matches!(
            parse_predicate("x >= "),
            Err(PredicateError::Syntax { .. })
        ));
        assert!(matches!(
            parse_predicate("true true"),
            Err(PredicateError::Syntax { position: 5, .. })
        ));
        assert!(parse_predicate("").is_err());
        assert!(parse_predicate("x = 3").is_err());
    }

    #[test]
    fn satisfaction() {
        let dom = grid(6);
        assert!(!p("x >= 4").satisfies(&dom, &v(3, 5)).unwrap());
        assert!(p("(x >= 4) & (y >= 4)").satisfies(&dom, &v(4, 4)).unwrap());
        assert!(!p("!(x == 2)").satisfies(&dom, &v(2, 5)).unwrap());
        assert_eq!(
            p("z > 0").satisfies(&dom, &v(0, 0)),
            Err(PredicateError::UnknownVariable("z".into()))
        );
        assert!(matches!(
            Predicate::True.satisfies(&dom, &Valuation::new([1])),
            Err(PredicateError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn value_sets() {
        let dom = grid(6);
        assert!(Predicate::False.value_set(&dom).unwrap().is_empty());
        let goal = p("(x >= 4) & (y >= 4)").value_set(&dom).unwrap();
        assert_eq!(goal.members(), &[v(4, 4), v(4, 5), v(5, 4), v(5, 5)]);
        assert_eq!(Predicate::True.value_set(&grid(4)).unwrap().len(), 16);
    }

    #[test]
    fn distances() {
        assert_eq!(distance(Metric::Manhattan, &v(3, 5), &v(2, 1)).unwrap(), 5.0);
        assert_eq!(distance(Metric::Chebyshev, &v(0, 0), &v(3, 4)).unwrap(), 4.0);
        assert_eq!(distance(Metric::Euclidean, &v(0, 0), &v(3, 4)).unwrap(), 5.0);
        for m in [Metric::Manhattan, Metric::Euclidean, Metric::Chebyshev] {
            assert_eq!(m.distance(&v(2, 3), &v(2, 3)).unwrap(), 0.0);
        }
        assert!(Metric::Manhattan
            .distance(&v(0, 0), &Valuation::new([1, 2, 3]))
            .is_err());
    }

    #[test]
    fn value_predicate_distance() {
        let dom = grid(6);
        let goal = p("(x >= 4) & (y >= 4)");
        assert_eq!(vpd(&v(0, 0), &goal, &dom, Metric::Manhattan).unwrap(), 8.0);
        assert_eq!(vpd(&v(5, 4), &goal, &dom, Metric::Manhattan).unwrap(), 0.0);
        assert_eq!(
            vpd(&v(1, 1), &Predicate::False, &dom, Metric::Manhattan).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn hausdorff_cases() {
        let dom = grid(6);
        let a = p("(x == 0) & (y == 0)");
        let b = p("(x == 3) & (y == 4)");
        assert_eq!(hausdorff(&a, &b, &dom, Metric::Manhattan).unwrap(), 7.0);
        let goal = p("(x >= 4) & (y >= 4)");
        assert_eq!(hausdorff(&goal, &goal, &dom, Metric::Manhattan).unwrap(), 0.0);
        assert_eq!(
            hausdorff(&goal, &Predicate::False, &dom, Metric::Manhattan).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn domain_enumeration() {
        let dom = Domain::new([("a", -1, 0), ("b", 2, 4)]).unwrap();
        assert_eq!(dom.size(), 6);
        let all: Vec<_> = dom.valuations().collect();
        assert_eq!(all[0], Valuation::new([-1, 2]));
        assert_eq!(all[5], Valuation::new([0, 4]));
        assert!(all.iter().all(|x| dom.contains(x)));
        assert!(Domain::new([("a", 3, 2)]).is_err());
        assert!(Domain::new(Vec::<(String, i64, i64)>::new()).is_err());
    }
}
