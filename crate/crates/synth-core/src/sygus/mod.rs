//! SyGuS benchmark frontend: parsing, spec classification, constraint
//! evaluation and the counterexample-guided loop.
//!
//! The supported surface is the v1 (2017-competition era) format: set-logic,
//! synth-fun with an inline grammar, declare-var, constraint and
//! check-synth. Anything else is reported as an unsupported construct.

mod cegis;
pub mod sexp;
mod verify;

pub use cegis::{cegis, CegisOutcome, ConstraintSpec, SynthStrategy};
pub use verify::{exhaustive_verifier, sampled_verifier, Verifier, VerifierError, VerifyResult};

use crate::eval::{Env, Example};
use crate::grammar::{Grammar, GrammarBuilder, GrammarError, Terminal};
use crate::ops::{resolve_operator, MalformedApplication, OperatorSig};
use crate::pcfg::PcfgError;
use crate::program::Program;
use crate::value::{Sort, Value, BV_WIDTH};
use sexp::{Atom, Pos, Sexp};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SygusError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: Pos, msg: String },
    #[error("unsupported construct at {pos}: {form}")]
    Unsupported { pos: Pos, form: String },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Pcfg(#[from] PcfgError),
    #[error(transparent)]
    Eval(#[from] MalformedApplication),
    #[error("verifier: {0}")]
    Verifier(#[from] VerifierError),
}

impl From<sexp::SexpError> for SygusError {
    fn from(e: sexp::SexpError) -> Self {
        SygusError::Parse {
            pos: e.pos,
            msg: e.msg,
        }
    }
}

fn parse_err(pos: Pos, msg: impl Into<String>) -> SygusError {
    SygusError::Parse {
        pos,
        msg: msg.into(),
    }
}

fn unsupported(sexp: &Sexp) -> SygusError {
    SygusError::Unsupported {
        pos: sexp.pos(),
        form: sexp.to_string(),
    }
}

/// Problem domain, derived from the set-logic tag and the sorts in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    Slia,
    Bv,
    CircuitBool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetFun {
    pub name: String,
    pub params: Vec<(String, Sort)>,
    pub return_sort: Sort,
}

/// A constraint term over the target function, universally quantified
/// variables, literals and theory operators.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Lit(Value),
    Var(String, Sort),
    App(&'static OperatorSig, Vec<Term>),
    /// Application of the function being synthesized.
    Target(Vec<Term>),
}

impl Term {
    pub fn sort(&self, target: &TargetFun) -> Sort {
        match self {
            Term::Lit(v) => v.sort(),
            Term::Var(_, s) => *s,
            Term::App(sig, _) => sig.result_sort,
            Term::Target(_) => target.return_sort,
        }
    }

    fn contains_target(&self) -> bool {
        match self {
            Term::Lit(_) | Term::Var(..) => false,
            Term::Target(_) => true,
            Term::App(_, args) => args.iter().any(Term::contains_target),
        }
    }
}

/// A parsed benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct SygusProblem {
    pub logic: Logic,
    pub logic_name: String,
    pub target: TargetFun,
    pub grammar: Arc<Grammar>,
    pub universals: Vec<(String, Sort)>,
    pub constraints: Vec<Term>,
}

/// The classified semantic specification.
#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    Pbe(Vec<Example>),
    FirstOrder,
}

fn parse_sort(sexp: &Sexp) -> Result<Sort, SygusError> {
    match sexp {
        Sexp::Atom(Atom::Sym(s), pos) => match s.as_str() {
            "String" => Ok(Sort::Str),
            "Int" => Ok(Sort::Int),
            "Bool" => Ok(Sort::Bool),
            _ => Err(parse_err(*pos, format!("unknown sort {s}"))),
        },
        Sexp::List(items, pos) => {
            let names: Vec<Option<&str>> = items.iter().map(Sexp::as_sym).collect();
            let width = match names.as_slice() {
                [Some("BitVec"), _] => items[1].clone(),
                [Some("_"), Some("BitVec"), _] => items[2].clone(),
                _ => return Err(parse_err(*pos, format!("unknown sort {sexp}"))),
            };
            match width {
                Sexp::Atom(Atom::Int(n), _) if n == BV_WIDTH as i64 => Ok(Sort::Bv),
                _ => Err(SygusError::Unsupported {
                    pos: *pos,
                    form: format!("bit-vector width in {sexp} (only {BV_WIDTH} supported)"),
                }),
            }
        }
        _ => Err(parse_err(sexp.pos(), format!("unknown sort {sexp}"))),
    }
}

fn atom_value(atom: &Atom) -> Option<Value> {
    match atom {
        Atom::Str(s) => Some(Value::Str(s.clone())),
        Atom::Int(n) => Some(Value::Int(*n)),
        Atom::Bv(w) => Some(Value::Bv(*w)),
        Atom::Bool(b) => Some(Value::Bool(*b)),
        Atom::Sym(_) => None,
    }
}

struct ProblemParser {
    logic_name: Option<String>,
    target: Option<TargetFun>,
    grammar: Option<Arc<Grammar>>,
    universals: Vec<(String, Sort)>,
    raw_constraints: Vec<Sexp>,
    saw_check_synth: bool,
}

impl ProblemParser {
    fn new() -> Self {
        ProblemParser {
            logic_name: None,
            target: None,
            grammar: None,
            universals: Vec::new(),
            raw_constraints: Vec::new(),
            saw_check_synth: false,
        }
    }

    fn feed(&mut self, form: &Sexp) -> Result<(), SygusError> {
        let items = form.as_list().ok_or_else(|| unsupported(form))?;
        let head = items
            .first()
            .and_then(Sexp::as_sym)
            .ok_or_else(|| unsupported(form))?;
        match head {
            "set-logic" => {
                let name = items
                    .get(1)
                    .and_then(Sexp::as_sym)
                    .ok_or_else(|| unsupported(form))?;
                self.logic_name = Some(name.to_string());
            }
            "synth-fun" => {
                if self.target.is_some() {
                    return Err(SygusError::Unsupported {
                        pos: form.pos(),
                        form: "second synth-fun".to_string(),
                    });
                }
                self.parse_synth_fun(form, items)?;
            }
            "declare-var" => {
                if items.len() != 3 {
                    return Err(unsupported(form));
                }
                let name = items[1].as_sym().ok_or_else(|| unsupported(form))?;
                let sort = parse_sort(&items[2])?;
                self.universals.push((name.to_string(), sort));
            }
            "constraint" => {
                if items.len() != 2 {
                    return Err(unsupported(form));
                }
                self.raw_constraints.push(items[1].clone());
            }
            "check-synth" => {
                self.saw_check_synth = true;
            }
            _ => return Err(unsupported(form)),
        }
        Ok(())
    }

    fn parse_synth_fun(&mut self, form: &Sexp, items: &[Sexp]) -> Result<(), SygusError> {
        if items.len() != 5 {
            return Err(unsupported(form));
        }
        let name = items[1].as_sym().ok_or_else(|| unsupported(form))?;
        let mut params = Vec::new();
        for p in items[2].as_list().ok_or_else(|| unsupported(form))? {
            let pair = p.as_list().ok_or_else(|| unsupported(p))?;
            if pair.len() != 2 {
                return Err(unsupported(p));
            }
            let pname = pair[0].as_sym().ok_or_else(|| unsupported(p))?;
            params.push((pname.to_string(), parse_sort(&pair[1])?));
        }
        let return_sort = parse_sort(&items[3])?;
        let target = TargetFun {
            name: name.to_string(),
            params,
            return_sort,
        };
        self.grammar = Some(Arc::new(parse_grammar_blocks(&items[4], &target)?));
        if self
            .grammar
            .as_ref()
            .map(|g| g.nonterminal(g.start()).sort)
            != Some(return_sort)
        {
            return Err(parse_err(
                items[4].pos(),
                "grammar start sort differs from function return sort",
            ));
        }
        self.target = Some(target);
        Ok(())
    }

    fn finish(self) -> Result<SygusProblem, SygusError> {
        let target = self.target.ok_or_else(|| parse_err(
            Pos { line: 1, col: 1 },
            "missing synth-fun",
        ))?;
        let grammar = self.grammar.expect("grammar set with target");
        let logic_name = self.logic_name.unwrap_or_else(|| "ALL".to_string());
        let mut constraints = Vec::new();
        for raw in &self.raw_constraints {
            let term = parse_term(raw, &target, &self.universals)?;
            if term.sort(&target) != Sort::Bool {
                return Err(parse_err(raw.pos(), "constraint is not boolean"));
            }
            constraints.push(term);
        }
        let sorts_in_use: Vec<Sort> = grammar.nonterminals().iter().map(|nt| nt.sort).collect();
        let logic = match logic_name.as_str() {
            "SLIA" => Logic::Slia,
            "BV" if sorts_in_use.iter().all(|s| *s == Sort::Bool) => Logic::CircuitBool,
            "BV" => Logic::Bv,
            _ if sorts_in_use.contains(&Sort::Str) => Logic::Slia,
            _ if sorts_in_use.contains(&Sort::Bv) => Logic::Bv,
            _ => Logic::CircuitBool,
        };
        Ok(SygusProblem {
            logic,
            logic_name,
            target,
            grammar,
            universals: self.universals,
            constraints,
        })
    }
}

fn parse_grammar_blocks(sexp: &Sexp, target: &TargetFun) -> Result<Grammar, SygusError> {
    let blocks = sexp.as_list().ok_or_else(|| unsupported(sexp))?;
    if blocks.is_empty() {
        return Err(unsupported(sexp));
    }
    let mut builder = GrammarBuilder::new();
    for (name, sort) in &target.params {
        builder = builder.variable(name, *sort);
    }
    let mut nt_names = Vec::new();
    let mut parsed_blocks = Vec::new();
    for block in blocks {
        let items = block.as_list().ok_or_else(|| unsupported(block))?;
        if items.len() != 3 {
            return Err(unsupported(block));
        }
        let nt = items[0].as_sym().ok_or_else(|| unsupported(block))?;
        let sort = parse_sort(&items[1])?;
        let rules = items[2].as_list().ok_or_else(|| unsupported(block))?;
        builder = builder.nonterminal(nt, sort);
        nt_names.push(nt.to_string());
        parsed_blocks.push((nt.to_string(), rules));
    }
    for (nt, rules) in &parsed_blocks {
        for rule in *rules {
            builder = add_grammar_rule(builder, nt, rule, target, &nt_names)?;
        }
    }
    let start = nt_names.first().expect("nonempty blocks");
    Ok(builder.build(start)?)
}

fn add_grammar_rule(
    builder: GrammarBuilder,
    nt: &str,
    rule: &Sexp,
    target: &TargetFun,
    nt_names: &[String],
) -> Result<GrammarBuilder, SygusError> {
    match rule {
        Sexp::Atom(Atom::Sym(name), _) => {
            if target.params.iter().any(|(p, _)| p == name) {
                Ok(builder.var(nt, name))
            } else if nt_names.iter().any(|n| n == name) {
                // A bare nonterminal would be a unit production, which the
                // program representation has no terminal for.
                Err(unsupported(rule))
            } else {
                Err(parse_err(rule.pos(), format!("unknown grammar symbol {name}")))
            }
        }
        Sexp::Atom(atom, _) => Ok(builder.literal(nt, atom_value(atom).expect("literal atom"))),
        Sexp::List(items, _) => {
            let op = items
                .first()
                .and_then(Sexp::as_sym)
                .ok_or_else(|| unsupported(rule))?;
            let mut rhs = Vec::new();
            for arg in &items[1..] {
                match arg.as_sym() {
                    Some(name) if nt_names.iter().any(|n| n == name) => rhs.push(name),
                    _ => return Err(unsupported(arg)),
                }
            }
            Ok(builder.op(nt, op, &rhs))
        }
    }
}

fn parse_term(
    sexp: &Sexp,
    target: &TargetFun,
    universals: &[(String, Sort)],
) -> Result<Term, SygusError> {
    match sexp {
        Sexp::Atom(Atom::Sym(name), pos) => universals
            .iter()
            .find(|(n, _)| n == name)
            .map(|(n, s)| Term::Var(n.clone(), *s))
            .ok_or_else(|| parse_err(*pos, format!("unknown symbol {name}"))),
        Sexp::Atom(atom, _) => Ok(Term::Lit(atom_value(atom).expect("literal atom"))),
        Sexp::List(items, pos) => {
            let head = items
                .first()
                .and_then(Sexp::as_sym)
                .ok_or_else(|| unsupported(sexp))?;
            let args: Vec<Term> = items[1..]
                .iter()
                .map(|s| parse_term(s, target, universals))
                .collect::<Result<_, _>>()?;
            if head == target.name {
                if args.len() != target.params.len() {
                    return Err(parse_err(*pos, "wrong arity for synthesized function"));
                }
                for (arg, (pname, psort)) in args.iter().zip(&target.params) {
                    if arg.contains_target() {
                        return Err(SygusError::Unsupported {
                            pos: *pos,
                            form: "nested application of the synthesized function".to_string(),
                        });
                    }
                    if arg.sort(target) != *psort {
                        return Err(parse_err(*pos, format!("argument for {pname} has wrong sort")));
                    }
                }
                return Ok(Term::Target(args));
            }
            // N-ary and/or fold to the binary catalog operators.
            if (head == "and" || head == "or") && args.len() > 2 {
                let sorts: Vec<Sort> = args.iter().map(|a| a.sort(target)).collect();
                if sorts.iter().all(|s| *s == Sort::Bool) {
                    let sig = resolve_operator(head, &[Sort::Bool, Sort::Bool]).expect("and/or");
                    let mut iter = args.into_iter();
                    let first = iter.next().expect("nonempty");
                    return Ok(iter.fold(first, |acc, next| Term::App(sig, vec![acc, next])));
                }
            }
            let sorts: Vec<Sort> = args.iter().map(|a| a.sort(target)).collect();
            let sig = resolve_operator(head, &sorts).ok_or_else(|| {
                parse_err(
                    *pos,
                    format!(
                        "no operator {head} for ({})",
                        sorts
                            .iter()
                            .map(|s| s.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    ),
                )
            })?;
            Ok(Term::App(sig, args))
        }
    }
}

/// Parses one benchmark file.
pub fn parse_sygus(text: &str) -> Result<SygusProblem, SygusError> {
    let forms = sexp::parse_all(text)?;
    let mut parser = ProblemParser::new();
    for form in &forms {
        parser.feed(form)?;
    }
    parser.finish()
}

/// Classifies the constraints: if every one is an equality between an
/// application of the target function to literals and a literal (either
/// orientation), the problem is inductive and the examples are extracted;
/// otherwise it is kept as a first-order spec.
pub fn extract_examples(problem: &SygusProblem) -> Spec {
    let mut examples = Vec::new();
    for c in &problem.constraints {
        let (app_args, out) = match c {
            Term::App(sig, args) if sig.name == "=" => match (&args[0], &args[1]) {
                (Term::Target(inner), Term::Lit(v)) => (inner, v),
                (Term::Lit(v), Term::Target(inner)) => (inner, v),
                _ => return Spec::FirstOrder,
            },
            _ => return Spec::FirstOrder,
        };
        let mut inputs = Env::new();
        for (arg, (name, _)) in app_args.iter().zip(&problem.target.params) {
            match arg {
                Term::Lit(v) => {
                    inputs.insert(name.clone(), v.clone());
                }
                _ => return Spec::FirstOrder,
            }
        }
        examples.push(Example {
            inputs,
            output: out.clone(),
        });
    }
    Spec::Pbe(examples)
}

/// Evaluates a constraint term under a binding of the universals, with
/// applications of the target function evaluated via the candidate.
pub fn eval_term(
    term: &Term,
    grammar: &Grammar,
    candidate: &Program,
    binding: &Env,
    target: &TargetFun,
) -> Result<Value, MalformedApplication> {
    match term {
        Term::Lit(v) => Ok(v.clone()),
        Term::Var(name, _) => binding.get(name).cloned().ok_or_else(|| MalformedApplication {
            op: name.clone(),
            expected: "bound universal".to_string(),
            got: "unbound".to_string(),
        }),
        Term::App(sig, args) => {
            let vals: Vec<Value> = args
                .iter()
                .map(|a| eval_term(a, grammar, candidate, binding, target))
                .collect::<Result<_, _>>()?;
            crate::ops::apply_operator(sig, &vals)
        }
        Term::Target(args) => {
            let mut env = Env::new();
            for (arg, (name, _)) in args.iter().zip(&target.params) {
                env.insert(
                    name.clone(),
                    eval_term(arg, grammar, candidate, binding, target)?,
                );
            }
            crate::eval::eval(grammar, candidate, &env)
        }
    }
}

/// Evaluates a constraint to its truth value.
pub fn eval_constraint(
    term: &Term,
    grammar: &Grammar,
    candidate: &Program,
    binding: &Env,
    target: &TargetFun,
) -> Result<bool, MalformedApplication> {
    match eval_term(term, grammar, candidate, binding, target)? {
        Value::Bool(b) => Ok(b),
        other => Err(MalformedApplication {
            op: "constraint".to_string(),
            expected: "Bool".to_string(),
            got: other.sort().to_string(),
        }),
    }
}

/// Parses an S-expression as a program of the grammar, rooted at the start
/// nonterminal. Inverse of `Program::display` for programs of the grammar.
pub fn parse_program(grammar: &Grammar, text: &str) -> Result<Program, SygusError> {
    let forms = sexp::parse_all(text)?;
    if forms.len() != 1 {
        return Err(parse_err(
            Pos { line: 1, col: 1 },
            "expected exactly one program term",
        ));
    }
    program_from_sexp(grammar, &forms[0], grammar.start())
}

fn program_from_sexp(
    grammar: &Grammar,
    sexp: &Sexp,
    nt: crate::grammar::NtId,
) -> Result<Program, SygusError> {
    let fail = |msg: String| parse_err(sexp.pos(), msg);
    match sexp {
        Sexp::Atom(Atom::Sym(name), _) => grammar
            .productions_of(nt)
            .find(|p| matches!(&p.terminal, Terminal::Var(v) if v == name))
            .map(|p| Program::leaf(p.id))
            .ok_or_else(|| fail(format!("no variable production {name} under this nonterminal"))),
        Sexp::Atom(atom, _) => {
            let value = atom_value(atom).expect("literal atom");
            grammar
                .productions_of(nt)
                .find(|p| matches!(&p.terminal, Terminal::Literal(v) if *v == value))
                .map(|p| Program::leaf(p.id))
                .ok_or_else(|| fail(format!("no literal production {value} under this nonterminal")))
        }
        Sexp::List(items, _) => {
            let head = items
                .first()
                .and_then(Sexp::as_sym)
                .ok_or_else(|| unsupported(sexp))?;
            let arity = items.len() - 1;
            for prod in grammar.productions_of(nt) {
                let sig = match &prod.terminal {
                    Terminal::Op(sig) => sig,
                    _ => continue,
                };
                if prod.arity() != arity {
                    continue;
                }
                let rhs_sorts: Vec<Sort> = prod
                    .rhs
                    .iter()
                    .map(|nt| grammar.nonterminal(*nt).sort)
                    .collect();
                if resolve_operator(head, &rhs_sorts) != Some(*sig) {
                    continue;
                }
                let children: Result<Vec<Program>, SygusError> = items[1..]
                    .iter()
                    .zip(&prod.rhs)
                    .map(|(child, child_nt)| program_from_sexp(grammar, child, *child_nt))
                    .collect();
                if let Ok(children) = children {
                    return Ok(Program::new(prod.id, children));
                }
            }
            Err(fail(format!("no production ({head} ...) fits this nonterminal")))
        }
    }
}

impl fmt::Display for SygusProblem {
    /// Regenerates the benchmark file; parsing the output yields a
    /// structurally equal problem.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(set-logic {})", self.logic_name)?;
        let params: Vec<String> = self
            .target
            .params
            .iter()
            .map(|(n, s)| format!("({n} {s})"))
            .collect();
        writeln!(
            f,
            "(synth-fun {} ({}) {}",
            self.target.name,
            params.join(" "),
            self.target.return_sort
        )?;
        writeln!(f, "    (")?;
        for (i, nt) in self.grammar.nonterminals().iter().enumerate() {
            let rules: Vec<String> = self
                .grammar
                .productions_of(crate::grammar::NtId(i as u32))
                .map(|p| {
                    if p.is_leaf() {
                        p.terminal.to_string()
                    } else {
                        let args: Vec<&str> = p
                            .rhs
                            .iter()
                            .map(|nt| self.grammar.nonterminal(*nt).name.as_str())
                            .collect();
                        format!("({} {})", p.terminal, args.join(" "))
                    }
                })
                .collect();
            writeln!(f, "        ({} {} ({}))", nt.name, nt.sort, rules.join(" "))?;
        }
        writeln!(f, "    ))")?;
        for (name, sort) in &self.universals {
            writeln!(f, "(declare-var {name} {sort})")?;
        }
        for c in &self.constraints {
            writeln!(
                f,
                "(constraint {})",
                TermDisplay {
                    term: c,
                    fname: &self.target.name
                }
            )?;
        }
        writeln!(f, "(check-synth)")
    }
}

struct TermDisplay<'a> {
    term: &'a Term,
    fname: &'a str,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |term| TermDisplay {
            term,
            fname: self.fname,
        };
        match self.term {
            Term::Lit(v) => write!(f, "{v}"),
            Term::Var(name, _) => write!(f, "{name}"),
            Term::App(sig, args) => {
                write!(f, "({}", sig.name)?;
                for a in args {
                    write!(f, " {}", child(a))?;
                }
                write!(f, ")")
            }
            Term::Target(args) => {
                write!(f, "({}", self.fname)?;
                for a in args {
                    write!(f, " {}", child(a))?;
                }
                write!(f, ")")
            }
        }
    }
}
