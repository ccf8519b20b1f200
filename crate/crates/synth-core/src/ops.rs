//! Operator catalog and total evaluation semantics.
//!
//! Covers the string, bit-vector and boolean operator sets used by the
//! benchmark grammars. Corner cases follow the SMT-LIB theories of strings
//! and fixed-size bit vectors: out-of-range `substr`/`at` yield `""`,
//! `str.to.int` on non-numeric input yields -1, `int.to.str` on negatives
//! yields `""`, unsigned division by zero yields the all-ones word, and
//! remainders by zero yield the dividend.

use crate::value::{Sort, Value};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Raised when an operator is applied to the wrong number or sorts of
/// arguments. This signals an internal bug (enumeration only ever builds
/// well-sorted programs), never a data condition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed application of {op}: expected {expected}, got {got}")]
pub struct MalformedApplication {
    pub op: String,
    pub expected: String,
    pub got: String,
}

/// Dense tag for operator dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    // Strings
    StrReplace,
    StrConcat,
    StrSubstr,
    StrAt,
    StrLen,
    StrIndexOf,
    StrContains,
    StrPrefixOf,
    StrSuffixOf,
    StrToInt,
    IntToStr,
    // Integers
    IntAdd,
    IntSub,
    // Bit vectors
    BvAnd,
    BvOr,
    BvXor,
    BvNot,
    BvNeg,
    BvAdd,
    BvSub,
    BvMul,
    BvUdiv,
    BvUrem,
    BvSdiv,
    BvSrem,
    BvShl,
    BvLshr,
    BvAshr,
    BvUlt,
    BvUle,
    BvUgt,
    BvSlt,
    BvSle,
    BvRedor,
    // Booleans
    BoolAnd,
    BoolOr,
    BoolXor,
    BoolNot,
    BoolImplies,
    // Polymorphic
    Eq,
    Ite,
}

/// An operator signature: a name plus argument and result sorts. The same
/// name may resolve to several signatures (`=`, `ite`, `and`, ...); lookup
/// is by name and argument sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperatorSig {
    pub name: &'static str,
    pub kind: OpKind,
    pub arg_sorts: Vec<Sort>,
    pub result_sort: Sort,
}

impl OperatorSig {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

impl fmt::Display for OperatorSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

use OpKind::*;
use Sort::*;

fn sig(name: &'static str, kind: OpKind, args: &[Sort], result: Sort) -> OperatorSig {
    OperatorSig {
        name,
        kind,
        arg_sorts: args.to_vec(),
        result_sort: result,
    }
}

static CATALOG: Lazy<Vec<OperatorSig>> = Lazy::new(|| {
    vec![
        sig("str.replace", StrReplace, &[Str, Str, Str], Str),
        sig("str.++", StrConcat, &[Str, Str], Str),
        sig("str.substr", StrSubstr, &[Str, Int, Int], Str),
        sig("str.at", StrAt, &[Str, Int], Str),
        sig("str.len", StrLen, &[Str], Int),
        sig("str.indexof", StrIndexOf, &[Str, Str, Int], Int),
        sig("str.contains", StrContains, &[Str, Str], Bool),
        sig("str.prefixof", StrPrefixOf, &[Str, Str], Bool),
        sig("str.suffixof", StrSuffixOf, &[Str, Str], Bool),
        sig("str.to.int", StrToInt, &[Str], Int),
        sig("int.to.str", IntToStr, &[Int], Str),
        sig("+", IntAdd, &[Int, Int], Int),
        sig("-", IntSub, &[Int, Int], Int),
        sig("bvand", BvAnd, &[Bv, Bv], Bv),
        sig("bvor", BvOr, &[Bv, Bv], Bv),
        sig("bvxor", BvXor, &[Bv, Bv], Bv),
        sig("bvnot", BvNot, &[Bv], Bv),
        sig("bvneg", BvNeg, &[Bv], Bv),
        sig("bvadd", BvAdd, &[Bv, Bv], Bv),
        sig("bvsub", BvSub, &[Bv, Bv], Bv),
        sig("bvmul", BvMul, &[Bv, Bv], Bv),
        sig("bvudiv", BvUdiv, &[Bv, Bv], Bv),
        sig("bvurem", BvUrem, &[Bv, Bv], Bv),
        sig("bvsdiv", BvSdiv, &[Bv, Bv], Bv),
        sig("bvsrem", BvSrem, &[Bv, Bv], Bv),
        sig("bvshl", BvShl, &[Bv, Bv], Bv),
        sig("bvlshr", BvLshr, &[Bv, Bv], Bv),
        sig("bvashr", BvAshr, &[Bv, Bv], Bv),
        sig("bvult", BvUlt, &[Bv, Bv], Bool),
        sig("bvule", BvUle, &[Bv, Bv], Bool),
        sig("bvugt", BvUgt, &[Bv, Bv], Bool),
        sig("bvslt", BvSlt, &[Bv, Bv], Bool),
        sig("bvsle", BvSle, &[Bv, Bv], Bool),
        sig("bvredor", BvRedor, &[Bv], Bool),
        sig("and", BoolAnd, &[Bool, Bool], Bool),
        sig("or", BoolOr, &[Bool, Bool], Bool),
        sig("xor", BoolXor, &[Bool, Bool], Bool),
        sig("not", BoolNot, &[Bool], Bool),
        sig("=>", BoolImplies, &[Bool, Bool], Bool),
        sig("=", Eq, &[Str, Str], Bool),
        sig("=", Eq, &[Int, Int], Bool),
        sig("=", Eq, &[Bool, Bool], Bool),
        sig("=", Eq, &[Bv, Bv], Bool),
        sig("ite", Ite, &[Bool, Str, Str], Str),
        sig("ite", Ite, &[Bool, Int, Int], Int),
        sig("ite", Ite, &[Bool, Bv, Bv], Bv),
        sig("ite", Ite, &[Bool, Bool, Bool], Bool),
    ]
});

/// Alternate spellings accepted by the parser, mapped to catalog names.
/// Benchmark files use the SMT-LIB names on the left of the catalog; the
/// short forms show up in hand-written grammars.
static ALIASES: Lazy<HashMap<&'static str, &'static str>> = Lazy::new(|| {
    let mut m = HashMap::new();
    m.insert("concat", "str.++");
    m.insert("replace", "str.replace");
    m.insert("substr", "str.substr");
    m.insert("at", "str.at");
    m.insert("len", "str.len");
    m.insert("length", "str.len");
    m.insert("indexof", "str.indexof");
    m.insert("contains", "str.contains");
    m.insert("prefixof", "str.prefixof");
    m.insert("suffixof", "str.suffixof");
    m.insert("to.int", "str.to.int");
    m.insert("str.to_int", "str.to.int");
    m.insert("str.from_int", "int.to.str");
    m.insert("add", "bvadd");
    m.insert("sub", "bvsub");
    m.insert("mul", "bvmul");
    m.insert("neg", "bvneg");
    m.insert("udiv", "bvudiv");
    m.insert("urem", "bvurem");
    m.insert("sdiv", "bvsdiv");
    m.insert("srem", "bvsrem");
    m.insert("shl", "bvshl");
    m.insert("lshr", "bvlshr");
    m.insert("ashr", "bvashr");
    m.insert("ult", "bvult");
    m.insert("ule", "bvule");
    m.insert("ugt", "bvugt");
    m.insert("slt", "bvslt");
    m.insert("sle", "bvsle");
    m.insert("redor", "bvredor");
    m
});

/// Looks up an operator by name and argument sorts. Short aliases resolve to
/// their canonical SMT-LIB spellings, and the bitwise names `and`/`or`/
/// `xor`/`not` resolve to the `bv*` forms when applied to bit vectors.
pub fn resolve_operator(name: &str, arg_sorts: &[Sort]) -> Option<&'static OperatorSig> {
    let canonical = ALIASES.get(name).copied().unwrap_or(name);
    let bitwise = match (canonical, arg_sorts.first()) {
        ("and", Some(Bv)) => "bvand",
        ("or", Some(Bv)) => "bvor",
        ("xor", Some(Bv)) => "bvxor",
        ("not", Some(Bv)) => "bvnot",
        _ => canonical,
    };
    CATALOG
        .iter()
        .find(|s| s.name == bitwise && s.arg_sorts == arg_sorts)
}

/// All signatures with a given canonical name, in catalog order.
pub fn signatures_named(name: &str) -> Vec<&'static OperatorSig> {
    let canonical = ALIASES.get(name).copied().unwrap_or(name);
    CATALOG.iter().filter(|s| s.name == canonical).collect()
}

/// The full operator catalog.
pub fn catalog() -> &'static [OperatorSig] {
    &CATALOG
}

// --- String helpers (SMT-LIB strings are sequences of code points, so all
// --- index arithmetic below is in characters, not bytes).

fn char_len(s: &str) -> i64 {
    s.chars().count() as i64
}

fn char_substr(s: &str, start: i64, len: i64) -> String {
    if start < 0 || start >= char_len(s) || len <= 0 {
        return String::new();
    }
    s.chars().skip(start as usize).take(len as usize).collect()
}

fn char_index_of(s: &str, needle: &str, from: i64) -> i64 {
    let n = char_len(s);
    if from < 0 || from > n {
        return -1;
    }
    if needle.is_empty() {
        return from;
    }
    let mut byte_positions: Vec<usize> = s.char_indices().map(|(i, _)| i).collect();
    byte_positions.push(s.len());
    for pos in (from as usize)..byte_positions.len() {
        if s[byte_positions[pos]..].starts_with(needle) {
            return pos as i64;
        }
    }
    -1
}

fn str_replace_first(s: &str, from: &str, to: &str) -> String {
    // SMT-LIB: the empty pattern occurs at index 0, so replacing it prepends.
    if from.is_empty() {
        let mut out = String::with_capacity(to.len() + s.len());
        out.push_str(to);
        out.push_str(s);
        return out;
    }
    match s.find(from) {
        Some(at) => {
            let mut out = String::with_capacity(s.len() - from.len() + to.len());
            out.push_str(&s[..at]);
            out.push_str(to);
            out.push_str(&s[at + from.len()..]);
            out
        }
        None => s.to_string(),
    }
}

fn str_to_int(s: &str) -> i64 {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
        return -1;
    }
    s.chars().fold(0i64, |acc, c| {
        acc.wrapping_mul(10).wrapping_add((c as u8 - b'0') as i64)
    })
}

// --- Bit-vector helpers.

fn bv_shift_amount(y: u64) -> Option<u32> {
    if y < 64 {
        Some(y as u32)
    } else {
        None
    }
}

fn bv_udiv(x: u64, y: u64) -> u64 {
    if y == 0 {
        u64::MAX
    } else {
        x / y
    }
}

fn bv_urem(x: u64, y: u64) -> u64 {
    if y == 0 {
        x
    } else {
        x % y
    }
}

// SMT-LIB defines bvsdiv/bvsrem in terms of bvudiv/bvurem on magnitudes,
// which fixes the division-by-zero cases: x / 0 is all-ones for
// non-negative x and one for negative x; x % 0 is x.
fn bv_sdiv(x: u64, y: u64) -> u64 {
    let (sx, sy) = (x >> 63 == 1, y >> 63 == 1);
    let mag = |v: u64, neg: bool| if neg { v.wrapping_neg() } else { v };
    let q = bv_udiv(mag(x, sx), mag(y, sy));
    if sx ^ sy {
        q.wrapping_neg()
    } else {
        q
    }
}

fn bv_srem(x: u64, y: u64) -> u64 {
    let (sx, sy) = (x >> 63 == 1, y >> 63 == 1);
    let mag = |v: u64, neg: bool| if neg { v.wrapping_neg() } else { v };
    let r = bv_urem(mag(x, sx), mag(y, sy));
    if sx {
        r.wrapping_neg()
    } else {
        r
    }
}

fn malformed(sig: &OperatorSig, args: &[&Value]) -> MalformedApplication {
    MalformedApplication {
        op: sig.name.to_string(),
        expected: format!("{:?}", sig.arg_sorts),
        got: format!("{:?}", args.iter().map(|v| v.sort()).collect::<Vec<_>>()),
    }
}

/// Applies an operator to borrowed argument values. Total on well-sorted
/// inputs; the `Err` case signals an arity or sort mismatch.
pub fn apply_operator_ref(
    sig: &OperatorSig,
    args: &[&Value],
) -> Result<Value, MalformedApplication> {
    if args.len() != sig.arity()
        || args
            .iter()
            .zip(&sig.arg_sorts)
            .any(|(v, s)| v.sort() != *s)
    {
        return Err(malformed(sig, args));
    }
    let s = |i: usize| -> &str {
        match args[i] {
            Value::Str(s) => s,
            _ => unreachable!(),
        }
    };
    let n = |i: usize| -> i64 {
        match args[i] {
            Value::Int(n) => *n,
            _ => unreachable!(),
        }
    };
    let b = |i: usize| -> bool {
        match args[i] {
            Value::Bool(b) => *b,
            _ => unreachable!(),
        }
    };
    let w = |i: usize| -> u64 {
        match args[i] {
            Value::Bv(w) => *w,
            _ => unreachable!(),
        }
    };
    Ok(match sig.kind {
        StrReplace => Value::Str(str_replace_first(s(0), s(1), s(2))),
        StrConcat => Value::Str(format!("{}{}", s(0), s(1))),
        StrSubstr => Value::Str(char_substr(s(0), n(1), n(2))),
        StrAt => Value::Str(char_substr(s(0), n(1), 1)),
        StrLen => Value::Int(char_len(s(0))),
        StrIndexOf => Value::Int(char_index_of(s(0), s(1), n(2))),
        StrContains => Value::Bool(s(0).contains(s(1))),
        StrPrefixOf => Value::Bool(s(1).starts_with(s(0))),
        StrSuffixOf => Value::Bool(s(1).ends_with(s(0))),
        StrToInt => Value::Int(str_to_int(s(0))),
        IntToStr => Value::Str(if n(0) < 0 {
            String::new()
        } else {
            n(0).to_string()
        }),
        IntAdd => Value::Int(n(0).wrapping_add(n(1))),
        IntSub => Value::Int(n(0).wrapping_sub(n(1))),
        BvAnd => Value::Bv(w(0) & w(1)),
        BvOr => Value::Bv(w(0) | w(1)),
        BvXor => Value::Bv(w(0) ^ w(1)),
        BvNot => Value::Bv(!w(0)),
        BvNeg => Value::Bv(w(0).wrapping_neg()),
        BvAdd => Value::Bv(w(0).wrapping_add(w(1))),
        BvSub => Value::Bv(w(0).wrapping_sub(w(1))),
        BvMul => Value::Bv(w(0).wrapping_mul(w(1))),
        BvUdiv => Value::Bv(bv_udiv(w(0), w(1))),
        BvUrem => Value::Bv(bv_urem(w(0), w(1))),
        BvSdiv => Value::Bv(bv_sdiv(w(0), w(1))),
        BvSrem => Value::Bv(bv_srem(w(0), w(1))),
        BvShl => Value::Bv(match bv_shift_amount(w(1)) {
            Some(k) => w(0) << k,
            None => 0,
        }),
        BvLshr => Value::Bv(match bv_shift_amount(w(1)) {
            Some(k) => w(0) >> k,
            None => 0,
        }),
        BvAshr => Value::Bv(match bv_shift_amount(w(1)) {
            Some(k) => ((w(0) as i64) >> k) as u64,
            None => ((w(0) as i64) >> 63) as u64,
        }),
        BvUlt => Value::Bool(w(0) < w(1)),
        BvUle => Value::Bool(w(0) <= w(1)),
        BvUgt => Value::Bool(w(0) > w(1)),
        BvSlt => Value::Bool((w(0) as i64) < (w(1) as i64)),
        BvSle => Value::Bool((w(0) as i64) <= (w(1) as i64)),
        BvRedor => Value::Bool(w(0) != 0),
        BoolAnd => Value::Bool(b(0) && b(1)),
        BoolOr => Value::Bool(b(0) || b(1)),
        BoolXor => Value::Bool(b(0) ^ b(1)),
        BoolNot => Value::Bool(!b(0)),
        BoolImplies => Value::Bool(!b(0) || b(1)),
        Eq => Value::Bool(args[0] == args[1]),
        Ite => {
            if b(0) {
                args[1].clone()
            } else {
                args[2].clone()
            }
        }
    })
}

/// Applies an operator to owned argument values.
pub fn apply_operator(sig: &OperatorSig, args: &[Value]) -> Result<Value, MalformedApplication> {
    let refs: Vec<&Value> = args.iter().collect();
    apply_operator_ref(sig, &refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(name: &str, sorts: &[Sort]) -> &'static OperatorSig {
        resolve_operator(name, sorts).unwrap()
    }

    #[test]
    fn replace_first_occurrence_only() {
        let sig = op("str.replace", &[Str, Str, Str]);
        let out = apply_operator(
            sig,
            &[
                Value::str("a < 4 and a > 0"),
                Value::str("<"),
                Value::str(""),
            ],
        )
        .unwrap();
        assert_eq!(out, Value::str("a  4 and a > 0"));
    }

    #[test]
    fn replace_empty_pattern_prepends() {
        let sig = op("str.replace", &[Str, Str, Str]);
        let out = apply_operator(sig, &[Value::str("bc"), Value::str(""), Value::str("a")]).unwrap();
        assert_eq!(out, Value::str("abc"));
    }

    #[test]
    fn concat_identity() {
        let sig = op("concat", &[Str, Str]);
        let out = apply_operator(sig, &[Value::str("x"), Value::str("")]).unwrap();
        assert_eq!(out, Value::str("x"));
    }

    #[test]
    fn indexof_missing_needle_is_minus_one() {
        let sig = op("str.indexof", &[Str, Str, Int]);
        let out = apply_operator(sig, &[Value::str("abc"), Value::str("z"), Value::Int(0)]).unwrap();
        assert_eq!(out, Value::Int(-1));
    }

    #[test]
    fn indexof_edges() {
        let sig = op("str.indexof", &[Str, Str, Int]);
        let run = |s: &str, t: &str, i: i64| {
            apply_operator(sig, &[Value::str(s), Value::str(t), Value::Int(i)]).unwrap()
        };
        assert_eq!(run("abcb", "b", 2), Value::Int(3));
        assert_eq!(run("abc", "", 2), Value::Int(2));
        assert_eq!(run("abc", "b", -1), Value::Int(-1));
        assert_eq!(run("abc", "b", 4), Value::Int(-1));
        assert_eq!(run("abc", "", 3), Value::Int(3));
    }

    #[test]
    fn substr_and_at_out_of_range_yield_empty() {
        let substr = op("str.substr", &[Str, Int, Int]);
        let at = op("str.at", &[Str, Int]);
        let sub = |s: &str, i: i64, n: i64| {
            apply_operator(substr, &[Value::str(s), Value::Int(i), Value::Int(n)]).unwrap()
        };
        assert_eq!(sub("hello", 1, 3), Value::str("ell"));
        assert_eq!(sub("hello", 3, 99), Value::str("lo"));
        assert_eq!(sub("hello", 5, 1), Value::str(""));
        assert_eq!(sub("hello", -1, 2), Value::str(""));
        assert_eq!(sub("hello", 1, 0), Value::str(""));
        assert_eq!(
            apply_operator(at, &[Value::str("abc"), Value::Int(7)]).unwrap(),
            Value::str("")
        );
    }

    #[test]
    fn string_int_conversions() {
        let to_int = op("str.to.int", &[Str]);
        let to_str = op("int.to.str", &[Int]);
        assert_eq!(
            apply_operator(to_int, &[Value::str("42")]).unwrap(),
            Value::Int(42)
        );
        assert_eq!(
            apply_operator(to_int, &[Value::str("4a")]).unwrap(),
            Value::Int(-1)
        );
        assert_eq!(
            apply_operator(to_int, &[Value::str("")]).unwrap(),
            Value::Int(-1)
        );
        assert_eq!(
            apply_operator(to_str, &[Value::Int(-4)]).unwrap(),
            Value::str("")
        );
        assert_eq!(
            apply_operator(to_str, &[Value::Int(17)]).unwrap(),
            Value::str("17")
        );
    }

    #[test]
    fn bv_division_by_zero() {
        let udiv = op("bvudiv", &[Bv, Bv]);
        let urem = op("bvurem", &[Bv, Bv]);
        let sdiv = op("bvsdiv", &[Bv, Bv]);
        let srem = op("bvsrem", &[Bv, Bv]);
        let run = |sig, x: u64, y: u64| {
            match apply_operator(sig, &[Value::Bv(x), Value::Bv(y)]).unwrap() {
                Value::Bv(w) => w,
                _ => unreachable!(),
            }
        };
        assert_eq!(run(udiv, 7, 0), u64::MAX);
        assert_eq!(run(urem, 7, 0), 7);
        assert_eq!(run(sdiv, 7, 0), u64::MAX);
        assert_eq!(run(sdiv, (-7i64) as u64, 0), 1);
        assert_eq!(run(srem, (-7i64) as u64, 0), (-7i64) as u64);
        assert_eq!(run(sdiv, (-8i64) as u64, 2), (-4i64) as u64);
        assert_eq!(run(srem, (-8i64) as u64, 3), (-2i64) as u64);
        assert_eq!(run(sdiv, i64::MIN as u64, (-1i64) as u64), i64::MIN as u64);
    }

    #[test]
    fn bv_shifts_saturate() {
        let shl = op("bvshl", &[Bv, Bv]);
        let ashr = op("bvashr", &[Bv, Bv]);
        let run = |sig, x: u64, y: u64| apply_operator(sig, &[Value::Bv(x), Value::Bv(y)]).unwrap();
        assert_eq!(run(shl, 1, 64), Value::Bv(0));
        assert_eq!(run(ashr, 1 << 63, 100), Value::Bv(u64::MAX));
        assert_eq!(run(ashr, 1, 100), Value::Bv(0));
    }

    #[test]
    fn alias_resolution_picks_sorted_instance() {
        assert_eq!(op("and", &[Bool, Bool]).kind, OpKind::BoolAnd);
        assert_eq!(op("and", &[Bv, Bv]).kind, OpKind::BvAnd);
        assert_eq!(op("not", &[Bv]).kind, OpKind::BvNot);
        assert_eq!(op("neg", &[Bv]).kind, OpKind::BvNeg);
        assert!(resolve_operator("and", &[Bool, Bv]).is_none());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let sig = op("str.len", &[Str]);
        assert!(apply_operator(sig, &[Value::Int(1)]).is_err());
        assert!(apply_operator(sig, &[]).is_err());
    }

    #[test]
    fn multibyte_strings_use_char_indices() {
        let substr = op("str.substr", &[Str, Int, Int]);
        let len = op("str.len", &[Str]);
        assert_eq!(
            apply_operator(len, &[Value::str("héllo")]).unwrap(),
            Value::Int(5)
        );
        assert_eq!(
            apply_operator(substr, &[Value::str("héllo"), Value::Int(1), Value::Int(2)]).unwrap(),
            Value::str("él")
        );
    }
}
