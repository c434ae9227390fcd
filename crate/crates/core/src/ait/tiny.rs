//! A toy prefix-free machine whose complexity can be computed exactly by
//! exhaustive enumeration up to a program-length horizon.
//!
//! Instruction set version 1. Codewords form a prefix code and every program
//! ends with its only `HALT`, so the set of valid programs is prefix-free.
//!
//! | codeword  | instruction | effect                                      |
//! |-----------|-------------|---------------------------------------------|
//! | `00`      | HALT        | stop, the output tape is the result         |
//! | `010`     | EMIT 0      | append `0`                                  |
//! | `011`     | EMIT 1      | append `1`                                  |
//! | `100`     | DUP         | `out ← out ‖ out`                           |
//! | `101`     | NEG         | `out ← out ‖ ¬out`                          |
//! | `110`     | DROP        | remove the last symbol, if any              |
//! | `111 kkk` | LOOP k      | jump to the first instruction while `|out| < 4(k+1)` |
//!
//! Each executed instruction costs one step and every appended symbol costs
//! one more. Runs that exceed the step budget or grow the output past
//! [`MAX_OUTPUT_BITS`] are discarded and counted.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const INSTRUCTION_SET_VERSION: u32 = 1;
/// Largest program-length horizon accepted by the enumerator.
pub const MAX_PROGRAM_BITS: u32 = 20;
pub const MAX_OUTPUT_BITS: usize = 64;
pub const DEFAULT_BUDGET: u32 = 256;

const CACHE_MAGIC: &[u8; 4] = b"QSTM";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    Halt,
    Emit(bool),
    Dup,
    Neg,
    Drop,
    Loop(u8),
}

impl Instruction {
    pub fn bit_len(self) -> u32 {
        match self {
            Self::Halt => 2,
            Self::Loop(_) => 6,
            _ => 3,
        }
    }

    fn non_halting() -> impl Iterator<Item = Instruction> {
        [Self::Emit(false), Self::Emit(true), Self::Dup, Self::Neg, Self::Drop]
            .into_iter()
            .chain((0..8).map(Self::Loop))
    }
}

/// Decodes a raw bit string. Returns `None` unless the bits are exactly one
/// valid program: a codeword sequence whose single `HALT` is the last codeword.
pub fn decode(bits: &[bool]) -> Option<Vec<Instruction>> {
    let mut program = Vec::new();
    let mut i = 0;
    let bit = |k: usize| bits.get(k).copied();
    while i < bits.len() {
        let instr = match (bit(i)?, bit(i + 1)?) {
            (false, false) => {
                i += 2;
                Instruction::Halt
            }
            (a, b) => {
                let c = bit(i + 2)?;
                i += 3;
                match (a, b, c) {
                    (false, true, c) => Instruction::Emit(c),
                    (true, false, false) => Instruction::Dup,
                    (true, false, true) => Instruction::Neg,
                    (true, true, false) => Instruction::Drop,
                    (true, true, true) => {
                        let k = (0..3).try_fold(0u8, |acc, off| Some(acc << 1 | bit(i + off)? as u8))?;
                        i += 3;
                        Instruction::Loop(k)
                    }
                    (false, false, _) => unreachable!(),
                }
            }
        };
        program.push(instr);
        if instr == Instruction::Halt {
            return (i == bits.len()).then_some(program);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted(Vec<bool>),
    BudgetExceeded,
    OutputOverflow,
}

pub fn execute(program: &[Instruction], budget: u32) -> RunOutcome {
    let mut out: Vec<bool> = Vec::new();
    let mut steps: u64 = 0;
    let mut pc = 0;
    let budget = u64::from(budget);
    while let Some(&instr) = program.get(pc) {
        steps += 1;
        pc += 1;
        match instr {
            Instruction::Halt => return RunOutcome::Halted(out),
            Instruction::Emit(b) => {
                out.push(b);
                steps += 1;
            }
            Instruction::Dup => {
                steps += out.len() as u64;
                out.extend_from_within(..);
            }
            Instruction::Neg => {
                steps += out.len() as u64;
                let len = out.len();
                for i in 0..len {
                    out.push(!out[i]);
                }
            }
            Instruction::Drop => {
                out.pop();
            }
            Instruction::Loop(k) => {
                if out.len() < 4 * (k as usize + 1) {
                    pc = 0;
                }
            }
        }
        if out.len() > MAX_OUTPUT_BITS {
            return RunOutcome::OutputOverflow;
        }
        if steps > budget {
            return RunOutcome::BudgetExceeded;
        }
    }
    // Programs always end in HALT, so falling off the end means a malformed program.
    RunOutcome::BudgetExceeded
}

/// Shortest-program lengths for every output produced by some program of at
/// most `max_len` bits within `budget` steps. Keys are ASCII `'0'`/`'1'` strings.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyTable {
    pub max_len: u32,
    pub budget: u32,
    entries: BTreeMap<Vec<u8>, u32>,
    pub programs_run: u64,
    pub budget_exceeded: u64,
    pub output_overflows: u64,
}

impl TinyTable {
    pub fn get(&self, output: &[u8]) -> Option<u32> {
        self.entries.get(output).copied()
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u8>, u32> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when some program was cut off; its output, if any, is unknown.
    pub fn is_partial(&self) -> bool {
        self.budget_exceeded > 0 || self.output_overflows > 0
    }

    fn record(&mut self, output: Vec<bool>, len: u32) {
        let key: Vec<u8> = output.into_iter().map(|b| if b { b'1' } else { b'0' }).collect();
        self.entries.entry(key).and_modify(|k| *k = (*k).min(len)).or_insert(len);
    }

    pub fn cache_file_name(max_len: u32, budget: u32) -> String {
        format!("tiny-v{INSTRUCTION_SET_VERSION}-L{max_len}-b{budget}.bin")
    }

    /// Little-endian: magic `QSTM`, u32 version, u32 max_len, u32 budget,
    /// u64 programs_run, u64 budget_exceeded, u64 output_overflows, u32 entry
    /// count, then per entry a u16 length, the key bytes, and a u32 value.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        for v in [INSTRUCTION_SET_VERSION, self.max_len, self.budget] {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in [self.programs_run, self.budget_exceeded, self.output_overflows] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(self.entries.len() as u32).to_le_bytes())?;
        for (key, value) in &self.entries {
            w.write_all(&(key.len() as u16).to_le_bytes())?;
            w.write_all(key)?;
            w.write_all(&value.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != INSTRUCTION_SET_VERSION {
            return Err(Error::Cache(format!("instruction set version {version}")));
        }
        let max_len = read_u32(&mut r)?;
        let budget = read_u32(&mut r)?;
        let programs_run = read_u64(&mut r)?;
        let budget_exceeded = read_u64(&mut r)?;
        let output_overflows = read_u64(&mut r)?;
        let count = read_u32(&mut r)?;
        let mut entries = BTreeMap::new();
        for _ in 0..count {
            let mut len = [0u8; 2];
            r.read_exact(&mut len)?;
            let mut key = vec![0u8; u16::from_le_bytes(len) as usize];
            r.read_exact(&mut key)?;
            entries.insert(key, read_u32(&mut r)?);
        }
        Ok(Self { max_len, budget, entries, programs_run, budget_exceeded, output_overflows })
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Runs every program of at most `max_len` bits for at most `budget` steps.
pub fn enumerate_tiny_machine(max_len: u32, budget: u32) -> Result<TinyTable> {
    if max_len > MAX_PROGRAM_BITS {
        return Err(Error::InvalidParameter(format!("program horizon {max_len} exceeds {MAX_PROGRAM_BITS} bits")));
    }
    let mut table = TinyTable {
        max_len,
        budget,
        entries: BTreeMap::new(),
        programs_run: 0,
        budget_exceeded: 0,
        output_overflows: 0,
    };
    let mut prefix = Vec::new();
    extend(&mut prefix, 0, max_len, budget, &mut table);
    Ok(table)
}

fn extend(prefix: &mut Vec<Instruction>, used: u32, max_len: u32, budget: u32, table: &mut TinyTable) {
    let halt = Instruction::Halt.bit_len();
    if used + halt > max_len {
        return;
    }
    prefix.push(Instruction::Halt);
    table.programs_run += 1;
    match execute(prefix, budget) {
        RunOutcome::Halted(out) => table.record(out, used + halt),
        RunOutcome::BudgetExceeded => table.budget_exceeded += 1,
        RunOutcome::OutputOverflow => table.output_overflows += 1,
    }
    prefix.pop();
    for instr in Instruction::non_halting() {
        let next = used + instr.bit_len();
        if next + halt <= max_len {
            prefix.push(instr);
            extend(prefix, next, max_len, budget, table);
            prefix.pop();
        }
    }
}

/// Loads the table for `(max_len, budget)` from `dir`, enumerating and
/// writing it on a miss.
pub fn load_or_enumerate(dir: &Path, max_len: u32, budget: u32) -> Result<TinyTable> {
    let path: PathBuf = dir.join(TinyTable::cache_file_name(max_len, budget));
    if let Ok(bytes) = fs::read(&path) {
        let table = TinyTable::read_from(bytes.as_slice())?;
        if table.max_len == max_len && table.budget == budget {
            return Ok(table);
        }
        return Err(Error::Cache(format!("{} holds a different key", path.display())));
    }
    let table = enumerate_tiny_machine(max_len, budget)?;
    fs::create_dir_all(dir)?;
    let mut buf = Vec::new();
    table.write_to(&mut buf)?;
    fs::write(&path, buf)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1').collect()
    }

    #[test]
    fn decoding() {
        assert_eq!(decode(&bits("00")), Some(vec![Instruction::Halt]));
        assert_eq!(
            decode(&bits("010 111 101 00")),
            Some(vec![Instruction::Emit(false), Instruction::Loop(5), Instruction::Halt])
        );
        assert_eq!(decode(&bits("00 00")), None);
        assert_eq!(decode(&bits("010")), None);
        assert_eq!(decode(&bits("111 10")), None);
    }

    #[test]
    fn execution() {
        let run = |s: &str| execute(&decode(&bits(s)).unwrap(), DEFAULT_BUDGET);
        assert_eq!(run("011 00"), RunOutcome::Halted(vec![true]));
        assert_eq!(run("011 101 100 00"), RunOutcome::Halted(bits("1010")));
        assert_eq!(run("010 111 000 00"), RunOutcome::Halted(bits("0000")));
        assert_eq!(run("011 110 00"), RunOutcome::Halted(vec![]));
        assert_eq!(run("111 000 00"), RunOutcome::BudgetExceeded);
        assert_eq!(run("011 111 111 00"), RunOutcome::Halted(vec![true; 32]));
        assert_eq!(run("011 100 100 100 100 100 100 100 00"), RunOutcome::OutputOverflow);
    }

    #[test]
    fn small_horizons() {
        assert!(enumerate_tiny_machine(0, 10).unwrap().is_empty());
        assert!(enumerate_tiny_machine(1, 10).unwrap().is_empty());
        let t = enumerate_tiny_machine(2, 10).unwrap();
        assert_eq!(t.get(b""), Some(2));
        assert_eq!(t.len(), 1);
        let t = enumerate_tiny_machine(5, 10).unwrap();
        assert_eq!(t.get(b"0"), Some(5));
        assert_eq!(t.get(b"1"), Some(5));
        assert!(enumerate_tiny_machine(21, 10).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let table = enumerate_tiny_machine(10, 64).unwrap();
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        assert_eq!(TinyTable::read_from(buf.as_slice()).unwrap(), table);
        buf[0] = b'X';
        assert!(TinyTable::read_from(buf.as_slice()).is_err());
    }

    #[test]
    fn load_or_enumerate_writes_cache() {
        let dir = tempfile::tempdir().unwrap();
        let built = load_or_enumerate(dir.path(), 9, 32).unwrap();
        assert!(dir.path().join(TinyTable::cache_file_name(9, 32)).exists());
        assert_eq!(load_or_enumerate(dir.path(), 9, 32).unwrap(), built);
    }
}
