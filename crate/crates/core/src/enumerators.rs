//! Stage-bounded models of computably enumerable sets of words.
//!
//! Each [`EnumeratorSpec`] plays the role of one set `W_e`. Its stage-`s`
//! approximation `W_{e,s}` is finite, computable, and grows with `s`; it is
//! empty whenever `s <= e`.
//!
//! Built-in kinds list their elements in a fixed sequence. The element at
//! position `j` is treated as input `j` with a halting cost of `j + 1` steps,
//! so it belongs to `W_{e,s}` exactly when `j + 1 < s`. Register machines are
//! run for real: word `u_x` belongs to `W_{e,s}` when `x < s` and the program
//! halts on `x` in fewer than `s` steps with output `y < s`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{
    index_to_word, pair_order_key, word_to_index, Alphabet, Word, WordError, WordIndex,
};

/// Longest word a built-in family may produce.
pub const MAX_WORD_LENGTH: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumeratorError {
    #[error("program line {line}: {message}")]
    Program { line: usize, message: String },
    #[error("invalid enumerator spec: {0}")]
    BadSpec(String),
    #[error("element {position} of enumerator {e} would have length above {MAX_WORD_LENGTH}")]
    WordTooLong { e: u64, position: u64 },
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerSchedule {
    /// `x, x^2, x^3, ...`
    All,
    /// `x, x^p, x^(p^2), ...`
    PowersOfP,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumeratorKind {
    AllWords,
    GeneratorPowers {
        generator: usize,
        schedule: PowerSchedule,
    },
    /// Words `u_start, u_(start+step), u_(start+2 step), ...`.
    IndexArithmetic {
        start: u64,
        step: u64,
    },
    ExplicitList {
        words: Vec<String>,
    },
    RegisterMachine {
        program: String,
    },
}

/// One enumerator `W_e` of a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct EnumeratorSpec {
    pub e: u64,
    pub kind: EnumeratorKind,
}

/// Flat JSON form, e.g. `{"e":0,"kind":"generator_powers","generator":1,"schedule":"powers_of_p"}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    e: u64,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<PowerSchedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    words: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    program: Option<String>,
}

impl TryFrom<RawSpec> for EnumeratorSpec {
    type Error = EnumeratorError;

    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        let allowed: &[&str] = match raw.kind.as_str() {
            "all_words" => &[],
            "generator_powers" => &["generator", "schedule"],
            "index_arithmetic" => &["start", "step"],
            "explicit_list" => &["words"],
            "register_machine" => &["program"],
            other => return Err(EnumeratorError::BadSpec(format!("unknown kind {other:?}"))),
        };
        let present = [
            ("generator", raw.generator.is_some()),
            ("schedule", raw.schedule.is_some()),
            ("start", raw.start.is_some()),
            ("step", raw.step.is_some()),
            ("words", raw.words.is_some()),
            ("program", raw.program.is_some()),
        ];
        for (field, is_set) in present {
            if is_set && !allowed.contains(&field) {
                return Err(EnumeratorError::BadSpec(format!(
                    "field {field:?} is not used by kind {:?}",
                    raw.kind
                )));
            }
        }
        let missing =
            |f: &str| EnumeratorError::BadSpec(format!("kind {:?} requires field {f:?}", raw.kind));
        let kind = match raw.kind.as_str() {
            "all_words" => EnumeratorKind::AllWords,
            "generator_powers" => EnumeratorKind::GeneratorPowers {
                generator: raw.generator.ok_or_else(|| missing("generator"))?,
                schedule: raw.schedule.unwrap_or(PowerSchedule::All),
            },
            "index_arithmetic" => EnumeratorKind::IndexArithmetic {
                start: raw.start.unwrap_or(0),
                step: raw.step.ok_or_else(|| missing("step"))?,
            },
            "explicit_list" => EnumeratorKind::ExplicitList {
                words: raw.words.ok_or_else(|| missing("words"))?,
            },
            _ => EnumeratorKind::RegisterMachine {
                program: raw.program.ok_or_else(|| missing("program"))?,
            },
        };
        Ok(EnumeratorSpec { e: raw.e, kind })
    }
}

impl From<EnumeratorSpec> for RawSpec {
    fn from(spec: EnumeratorSpec) -> Self {
        let mut raw = RawSpec {
            e: spec.e,
            ..Default::default()
        };
        match spec.kind {
            EnumeratorKind::AllWords => raw.kind = "all_words".into(),
            EnumeratorKind::GeneratorPowers {
                generator,
                schedule,
            } => {
                raw.kind = "generator_powers".into();
                raw.generator = Some(generator);
                raw.schedule = Some(schedule);
            }
            EnumeratorKind::IndexArithmetic { start, step } => {
                raw.kind = "index_arithmetic".into();
                raw.start = Some(start);
                raw.step = Some(step);
            }
            EnumeratorKind::ExplicitList { words } => {
                raw.kind = "explicit_list".into();
                raw.words = Some(words);
            }
            EnumeratorKind::RegisterMachine { program } => {
                raw.kind = "register_machine".into();
                raw.program = Some(program);
            }
        }
        raw
    }
}

/// Counter machine instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    Inc(usize),
    /// Decrement if positive and continue, otherwise jump.
    DecOrJump(usize, usize),
    Halt,
}

/// A counter machine. Input goes in register 0, output is read from
/// register 0 on halting. Running past the last instruction halts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    code: Vec<Instruction>,
    registers: usize,
}

/// Registers addressable by a program.
pub const MAX_REGISTERS: usize = 64;

impl Program {
    /// One instruction per line: `inc R`, `dec R TARGET`, `halt`. Targets
    /// are 0-based instruction numbers. `#` starts a comment; blank lines
    /// are ignored and do not count as instructions.
    pub fn parse(text: &str) -> Result<Self, EnumeratorError> {
        let mut code = Vec::new();
        let mut registers = 1;
        for (n, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| EnumeratorError::Program {
                line: n + 1,
                message: message.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let reg = |s: &str| -> Result<usize, EnumeratorError> {
                let r: usize = s.parse().map_err(|_| err("bad register"))?;
                if r >= MAX_REGISTERS {
                    return Err(err("register index too large"));
                }
                Ok(r)
            };
            let ins = match fields.as_slice() {
                ["inc", r] => Instruction::Inc(reg(r)?),
                ["dec", r, target] => Instruction::DecOrJump(
                    reg(r)?,
                    target.parse().map_err(|_| err("bad jump target"))?,
                ),
                ["halt"] => Instruction::Halt,
                _ => return Err(err(&format!("cannot parse {line:?}"))),
            };
            if let Instruction::Inc(r) | Instruction::DecOrJump(r, _) = ins {
                registers = registers.max(r + 1);
            }
            code.push(ins);
        }
        for (i, ins) in code.iter().enumerate() {
            if let Instruction::DecOrJump(_, t) = ins {
                if *t > code.len() {
                    return Err(EnumeratorError::Program {
                        line: i + 1,
                        message: format!("jump target {t} beyond program end"),
                    });
                }
            }
        }
        Ok(Program { code, registers })
    }

    /// Output if the machine halts on `input` within `max_steps` executed
    /// instructions (an explicit `halt` counts as one).
    pub fn run(&self, input: u64, max_steps: u64) -> Option<u64> {
        let mut regs = vec![0u64; self.registers];
        regs[0] = input;
        let mut pc = 0usize;
        let mut steps = 0u64;
        loop {
            let Some(&ins) = self.code.get(pc) else {
                return Some(regs[0]);
            };
            if steps == max_steps {
                return None;
            }
            steps += 1;
            match ins {
                Instruction::Halt => return Some(regs[0]),
                Instruction::Inc(r) => {
                    regs[r] += 1;
                    pc += 1;
                }
                Instruction::DecOrJump(r, target) => {
                    if regs[r] > 0 {
                        regs[r] -= 1;
                        pc += 1;
                    } else {
                        pc = target;
                    }
                }
            }
        }
    }
}

/// A word of a stage set together with its enumeration index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedWord {
    pub index: WordIndex,
    pub word: Word,
}

impl IndexedWord {
    pub fn new(word: Word) -> Self {
        IndexedWord {
            index: word_to_index(&word),
            word,
        }
    }
}

/// `W_{e,s}`, members sorted by word index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSet {
    pub e: u64,
    pub s: u64,
    pub members: Vec<IndexedWord>,
}

impl StageSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        let idx = word_to_index(w);
        self.members.binary_search_by(|m| m.index.cmp(&idx)).is_ok()
    }
}

/// All ordered pairs of distinct members, in Cantor pairing order of their
/// word indices.
pub fn distinct_pairs(set: &StageSet) -> Vec<(&IndexedWord, &IndexedWord)> {
    let mut pairs: Vec<(&IndexedWord, &IndexedWord)> =
        Vec::with_capacity(set.len() * set.len().saturating_sub(1));
    for a in &set.members {
        for b in &set.members {
            if a.index != b.index {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_by_cached_key(|(a, b)| pair_order_key(&a.index, &b.index));
    pairs
}

#[derive(Debug, Clone)]
enum Source {
    AllWords,
    Powers {
        generator: usize,
        base: u64,
        geometric: bool,
    },
    Arithmetic {
        start: u64,
        step: u64,
    },
    List(Vec<Word>),
    Machine(Program),
}

/// An [`EnumeratorSpec`] bound to an alphabet and prime, ready to run.
#[derive(Debug, Clone)]
pub struct Enumerator {
    spec: EnumeratorSpec,
    rank: usize,
    source: Source,
}

impl Enumerator {
    /// Parses words and programs up front so that enumeration cannot fail on
    /// malformed input later.
    pub fn new(
        spec: &EnumeratorSpec,
        alphabet: &Alphabet,
        p: u32,
    ) -> Result<Self, EnumeratorError> {
        let rank = alphabet.rank();
        let source = match &spec.kind {
            EnumeratorKind::AllWords => Source::AllWords,
            EnumeratorKind::GeneratorPowers {
                generator,
                schedule,
            } => {
                if *generator == 0 || *generator > rank {
                    return Err(WordError::GeneratorOutOfRange {
                        generator: *generator as i64,
                        rank,
                    }
                    .into());
                }
                Source::Powers {
                    generator: *generator,
                    base: p as u64,
                    geometric: *schedule == PowerSchedule::PowersOfP,
                }
            }
            EnumeratorKind::IndexArithmetic { start, step } => Source::Arithmetic {
                start: *start,
                step: *step,
            },
            EnumeratorKind::ExplicitList { words } => Source::List(
                words
                    .iter()
                    .map(|w| alphabet.parse(w))
                    .collect::<Result<_, _>>()?,
            ),
            EnumeratorKind::RegisterMachine { program } => {
                Source::Machine(Program::parse(program)?)
            }
        };
        Ok(Enumerator {
            spec: spec.clone(),
            rank,
            source,
        })
    }

    pub fn spec(&self) -> &EnumeratorSpec {
        &self.spec
    }

    pub fn e(&self) -> u64 {
        self.spec.e
    }

    pub fn is_machine(&self) -> bool {
        matches!(self.source, Source::Machine(_))
    }

    /// Element at `position` of a built-in sequence; `None` past the end of a
    /// finite list.
    fn element(&self, position: u64) -> Result<Option<Word>, EnumeratorError> {
        let too_long = || EnumeratorError::WordTooLong {
            e: self.spec.e,
            position,
        };
        Ok(match &self.source {
            Source::AllWords => Some(index_to_word(&WordIndex::from(position), self.rank)),
            Source::Powers {
                generator,
                base,
                geometric,
            } => {
                let exp = if *geometric {
                    u32::try_from(position)
                        .ok()
                        .and_then(|j| base.checked_pow(j))
                        .ok_or_else(too_long)?
                } else {
                    position + 1
                };
                if exp > MAX_WORD_LENGTH as u64 {
                    return Err(too_long());
                }
                Some(Word::generator(self.rank, *generator)?.pow(exp as i64))
            }
            Source::Arithmetic { start, step } => {
                let idx = step
                    .checked_mul(position)
                    .and_then(|v| v.checked_add(*start))
                    .ok_or(WordError::Overflow("arithmetic index"))?;
                Some(index_to_word(&WordIndex::from(idx), self.rank))
            }
            Source::List(words) => usize::try_from(position)
                .ok()
                .and_then(|i| words.get(i))
                .cloned(),
            Source::Machine(_) => unreachable!("machines have no positional elements"),
        })
    }

    fn list_len(&self) -> Option<u64> {
        match &self.source {
            Source::List(words) => Some(words.len() as u64),
            _ => None,
        }
    }

    /// `W_{e,s}`.
    pub fn enumerate_up_to(&self, s: u64) -> Result<StageSet, EnumeratorError> {
        let mut seen = BTreeSet::new();
        let mut members = Vec::new();
        let mut push = |word: Word| {
            let iw = IndexedWord::new(word);
            if seen.insert(iw.index.clone()) {
                members.push(iw);
            }
        };
        if self.spec.e < s {
            match &self.source {
                Source::Machine(program) => {
                    for x in 0..s {
                        if let Some(y) = program.run(x, s - 1) {
                            if y < s {
                                push(index_to_word(&WordIndex::from(x), self.rank));
                            }
                        }
                    }
                }
                _ => {
                    // position j costs j + 1 steps, admitted when j + 1 < s
                    let mut end = s.saturating_sub(1);
                    if let Some(len) = self.list_len() {
                        end = end.min(len);
                    }
                    for j in 0..end {
                        if let Some(w) = self.element(j)? {
                            push(w);
                        }
                    }
                }
            }
        }
        members.sort_by(|a, b| a.index.cmp(&b.index));
        Ok(StageSet {
            e: self.spec.e,
            s,
            members,
        })
    }

    /// Members in order of first appearance through stage `max_stage`:
    /// sequence order for built-ins, then (stage, index) order for machines.
    /// Repeats are skipped.
    pub fn stream(&self, max_stage: u64) -> EnumerationStream<'_> {
        EnumerationStream {
            enumerator: self,
            max_stage,
            stage: 0,
            position: 0,
            pending: Vec::new(),
            seen: BTreeSet::new(),
            failed: false,
        }
    }
}

impl fmt::Display for EnumeratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let raw = RawSpec::from(self.clone());
        write!(f, "W_{} ({})", self.e, raw.kind)
    }
}

pub struct EnumerationStream<'a> {
    enumerator: &'a Enumerator,
    max_stage: u64,
    stage: u64,
    position: u64,
    pending: Vec<Word>,
    seen: BTreeSet<WordIndex>,
    failed: bool,
}

impl Iterator for EnumerationStream<'_> {
    type Item = Result<Word, EnumeratorError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let en = self.enumerator;
        if en.is_machine() {
            loop {
                if let Some(w) = self.pending.pop() {
                    return Some(Ok(w));
                }
                if self.stage >= self.max_stage {
                    return None;
                }
                self.stage += 1;
                let set = match en.enumerate_up_to(self.stage) {
                    Ok(set) => set,
                    Err(e) => {
                        self.failed = true;
                        return Some(Err(e));
                    }
                };
                let fresh: Vec<Word> = set
                    .members
                    .into_iter()
                    .filter(|m| self.seen.insert(m.index.clone()))
                    .map(|m| m.word)
                    .collect();
                self.pending = fresh.into_iter().rev().collect();
            }
        }
        // built-ins: position j is admitted at stage max(e + 1, j + 2)
        loop {
            let j = self.position;
            let admitted = en.spec.e < self.max_stage && j + 1 < self.max_stage;
            if !admitted || en.list_len().is_some_and(|len| j >= len) {
                return None;
            }
            self.position += 1;
            match en.element(j) {
                Ok(Some(w)) => {
                    if self.seen.insert(word_to_index(&w)) {
                        return Some(Ok(w));
                    }
                }
                Ok(None) => return None,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn spec(e: u64, kind: EnumeratorKind) -> EnumeratorSpec {
        EnumeratorSpec { e, kind }
    }

    fn words(set: &StageSet) -> Vec<Word> {
        set.members.iter().map(|m| m.word.clone()).collect()
    }

    #[test]
    fn stage_zero_is_empty() {
        for kind in [
            EnumeratorKind::AllWords,
            EnumeratorKind::RegisterMachine {
                program: "halt".into(),
            },
        ] {
            let en = Enumerator::new(&spec(0, kind), &alphabet(), 2).unwrap();
            assert!(en.enumerate_up_to(0).unwrap().is_empty());
        }
    }

    #[test]
    fn all_words_cost_rule() {
        let en = Enumerator::new(&spec(0, EnumeratorKind::AllWords), &alphabet(), 2).unwrap();
        let set = en.enumerate_up_to(5).unwrap();
        let expected: Vec<Word> = (0..4)
            .map(|i| index_to_word(&WordIndex::from(i), 2))
            .collect();
        assert_eq!(words(&set), expected);

        let late = Enumerator::new(&spec(7, EnumeratorKind::AllWords), &alphabet(), 2).unwrap();
        assert!(late.enumerate_up_to(7).unwrap().is_empty());
        assert_eq!(late.enumerate_up_to(8).unwrap().len(), 7);
    }

    #[test]
    fn powers_of_p() {
        let kind = EnumeratorKind::GeneratorPowers {
            generator: 1,
            schedule: PowerSchedule::PowersOfP,
        };
        let en = Enumerator::new(&spec(0, kind), &alphabet(), 2).unwrap();
        let set = en.enumerate_up_to(7).unwrap();
        let x1 = Word::generator(2, 1).unwrap();
        let expected: Vec<Word> = [1, 2, 4, 8, 16, 32].iter().map(|&k| x1.pow(k)).collect();
        assert_eq!(words(&set), expected);
    }

    #[test]
    fn explicit_list_and_arithmetic() {
        let kind = EnumeratorKind::ExplicitList {
            words: vec!["x2".into(), "x1".into(), "x2".into()],
        };
        let en = Enumerator::new(&spec(0, kind), &alphabet(), 2).unwrap();
        assert_eq!(en.enumerate_up_to(100).unwrap().len(), 2);
        let stream: Vec<Word> = en.stream(100).map(Result::unwrap).collect();
        assert_eq!(
            stream,
            vec![
                Word::generator(2, 2).unwrap(),
                Word::generator(2, 1).unwrap()
            ]
        );

        let kind = EnumeratorKind::IndexArithmetic { start: 3, step: 5 };
        let en = Enumerator::new(&spec(1, kind), &alphabet(), 2).unwrap();
        let idx: Vec<WordIndex> = en
            .enumerate_up_to(5)
            .unwrap()
            .members
            .into_iter()
            .map(|m| m.index)
            .collect();
        assert_eq!(
            idx,
            vec![3u64.into(), 8u64.into(), 13u64.into(), 18u64.into()]
        );

        let bad = EnumeratorKind::ExplicitList {
            words: vec!["x9".into()],
        };
        assert!(Enumerator::new(&spec(0, bad), &alphabet(), 2).is_err());
    }

    #[test]
    fn register_machine_semantics() {
        // identity function: halts after one step
        let en = Enumerator::new(
            &spec(
                0,
                EnumeratorKind::RegisterMachine {
                    program: "halt".into(),
                },
            ),
            &alphabet(),
            2,
        )
        .unwrap();
        assert!(en.enumerate_up_to(1).unwrap().is_empty());
        assert_eq!(en.enumerate_up_to(2).unwrap().len(), 2);
        assert_eq!(en.enumerate_up_to(10).unwrap().len(), 10);

        // doubling: output 2x must stay below s
        let double =
            "dec 0 4\ninc 1\ninc 1\ndec 2 0\n# move r1 into r0\ndec 1 7\ninc 0\ndec 2 4\nhalt";
        let program = Program::parse(double).unwrap();
        assert_eq!(program.run(3, 1000), Some(6));
        assert_eq!(program.run(3, 5), None);

        let en = Enumerator::new(
            &spec(
                0,
                EnumeratorKind::RegisterMachine {
                    program: double.into(),
                },
            ),
            &alphabet(),
            2,
        )
        .unwrap();
        let set = en.enumerate_up_to(40).unwrap();
        assert!(set
            .members
            .iter()
            .all(|m| m.index.to_u64().unwrap() * 2 < 40));
    }

    #[test]
    fn program_parse_errors() {
        assert!(matches!(
            Program::parse("jump 3"),
            Err(EnumeratorError::Program { line: 1, .. })
        ));
        assert!(matches!(
            Program::parse("halt\ndec 0 9"),
            Err(EnumeratorError::Program { line: 2, .. })
        ));
        assert!(Program::parse("inc 99").is_err());
        assert!(Program::parse("").unwrap().run(5, 0) == Some(5));
    }

    #[test]
    fn infinite_loop_contributes_nothing() {
        let en = Enumerator::new(
            &spec(
                0,
                EnumeratorKind::RegisterMachine {
                    program: "dec 1 0".into(),
                },
            ),
            &alphabet(),
            2,
        )
        .unwrap();
        assert!(en.enumerate_up_to(2_000).unwrap().is_empty());
    }

    #[test]
    fn distinct_pair_order() {
        let kind = EnumeratorKind::ExplicitList {
            words: vec!["x1".into()],
        };
        let en = Enumerator::new(&spec(0, kind), &alphabet(), 2).unwrap();
        assert!(distinct_pairs(&en.enumerate_up_to(10).unwrap()).is_empty());

        let kind = EnumeratorKind::ExplicitList {
            words: vec!["x2".into(), "x1".into()],
        };
        let en = Enumerator::new(&spec(0, kind), &alphabet(), 2).unwrap();
        let set = en.enumerate_up_to(10).unwrap();
        let pairs = distinct_pairs(&set);
        let got: Vec<(Word, Word)> = pairs
            .iter()
            .map(|(a, b)| (a.word.clone(), b.word.clone()))
            .collect();
        let (x1, x2) = (
            Word::generator(2, 1).unwrap(),
            Word::generator(2, 2).unwrap(),
        );
        assert_eq!(got, vec![(x1.clone(), x2.clone()), (x2, x1)]);

        let kind = EnumeratorKind::ExplicitList {
            words: vec!["x1".into(), "x2".into(), "x1x2".into()],
        };
        let en = Enumerator::new(&spec(0, kind), &alphabet(), 2).unwrap();
        assert_eq!(distinct_pairs(&en.enumerate_up_to(10).unwrap()).len(), 6);
    }

    #[test]
    fn json_form() {
        let json = r#"{"e":0,"kind":"generator_powers","generator":1,"schedule":"powers_of_p"}"#;
        let s: EnumeratorSpec = serde_json::from_str(json).unwrap();
        assert_eq!(
            s.kind,
            EnumeratorKind::GeneratorPowers {
                generator: 1,
                schedule: PowerSchedule::PowersOfP
            }
        );
        assert_eq!(serde_json::to_string(&s).unwrap(), json);
        assert!(
            serde_json::from_str::<EnumeratorSpec>(r#"{"e":0,"kind":"all_words","step":2}"#)
                .is_err()
        );
        assert!(
            serde_json::from_str::<EnumeratorSpec>(r#"{"e":0,"kind":"all_words","bogus":2}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<EnumeratorSpec>(r#"{"e":0,"kind":"nope"}"#).is_err());
        assert!(
            serde_json::from_str::<EnumeratorSpec>(r#"{"e":0,"kind":"index_arithmetic"}"#).is_err()
        );
    }
}
