//! Banked scratchpad model with XOR-striped placement.
//!
//! A page holds one residue polynomial viewed as a square rows x cols
//! matrix; element (row, col) lives in bank `row ^ col` at in-bank word
//! `base + row`.  Every row and every column then touches each bank exactly
//! once, so both access orders are conflict-free.  Row and column accessors
//! return words in bank order; restoring index order is the permutation
//! unit's job, not the memory's.

use crate::error::AccelError;
use std::collections::BTreeMap;

/// Logical page shape.  The striping function needs row and column indices
/// of equal width, so the view is square and the bank count equals `cols`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
}

impl Geometry {
    pub fn square(bank_log: u32) -> Self {
        let side = 1usize << bank_log;
        Geometry { rows: side, cols: side }
    }

    /// Square view of a degree 2^n_log polynomial (n_log must be even).
    pub fn for_degree(n_log: u32) -> Self {
        assert!(n_log % 2 == 0, "square layout needs an even degree exponent");
        Geometry::square(n_log / 2)
    }

    pub fn banks(&self) -> usize {
        self.cols
    }

    pub fn words(&self) -> usize {
        self.rows * self.cols
    }

    pub fn bank(&self, row: usize, col: usize) -> usize {
        assert!(row < self.rows && col < self.cols);
        row ^ col
    }
}

#[derive(Debug, Clone)]
pub struct BankedMemory {
    pub geometry: Geometry,
    words_per_bank: usize,
    banks: Vec<Vec<u32>>,
    pages: BTreeMap<u32, usize>,
}

impl BankedMemory {
    pub fn new(geometry: Geometry, words_per_bank: usize) -> Self {
        assert!(geometry.rows.is_power_of_two() && geometry.rows == geometry.cols);
        assert!(words_per_bank >= geometry.rows);
        BankedMemory {
            geometry,
            words_per_bank,
            banks: vec![vec![0u32; words_per_bank]; geometry.banks()],
            pages: BTreeMap::new(),
        }
    }

    /// Full-size configuration: 256 banks of 2^16 words (2^24 words total).
    pub fn full_config() -> Self {
        BankedMemory::new(Geometry::square(8), 1 << 16)
    }

    pub fn total_words(&self) -> usize {
        self.geometry.banks() * self.words_per_bank
    }

    pub fn words_per_bank(&self) -> usize {
        self.words_per_bank
    }

    /// Assign a page to a fixed base word within every bank.  Bases are
    /// chosen by the compiler; the model only checks range and overlap.
    pub fn map_page(&mut self, page: u32, base: usize) -> Result<(), AccelError> {
        if base + self.geometry.rows > self.words_per_bank {
            return Err(AccelError::PageRange { page });
        }
        let rows = self.geometry.rows;
        for (&other, &ob) in &self.pages {
            if other != page && base < ob + rows && ob < base + rows {
                return Err(AccelError::PageOverlap { page });
            }
        }
        self.pages.insert(page, base);
        Ok(())
    }

    pub fn unmap_page(&mut self, page: u32) {
        self.pages.remove(&page);
    }

    pub fn page_base(&self, page: u32) -> Result<usize, AccelError> {
        self.pages
            .get(&page)
            .copied()
            .ok_or(AccelError::UnmappedPage { page })
    }

    /// One word from every bank at the same in-bank address; lane order is
    /// bank order, so lane b holds element (row, row ^ b).
    pub fn read_row(&self, page: u32, row: usize) -> Result<Vec<u32>, AccelError> {
        let base = self.page_base(page)?;
        assert!(row < self.geometry.rows);
        Ok(self.banks.iter().map(|bank| bank[base + row]).collect())
    }

    /// Column access with per-bank addresses; lane b holds element
    /// (b ^ col, col).
    pub fn read_col(&self, page: u32, col: usize) -> Result<Vec<u32>, AccelError> {
        let base = self.page_base(page)?;
        assert!(col < self.geometry.cols);
        Ok(self
            .banks
            .iter()
            .enumerate()
            .map(|(b, bank)| bank[base + (b ^ col)])
            .collect())
    }

    pub fn write_row(&mut self, page: u32, row: usize, lanes: &[u32]) -> Result<(), AccelError> {
        let base = self.page_base(page)?;
        assert!(row < self.geometry.rows);
        assert_eq!(lanes.len(), self.geometry.banks());
        for (bank, &v) in self.banks.iter_mut().zip(lanes) {
            bank[base + row] = v;
        }
        Ok(())
    }

    pub fn write_col(&mut self, page: u32, col: usize, lanes: &[u32]) -> Result<(), AccelError> {
        let base = self.page_base(page)?;
        assert!(col < self.geometry.cols);
        assert_eq!(lanes.len(), self.geometry.banks());
        for (b, (bank, &v)) in self.banks.iter_mut().zip(lanes).enumerate() {
            bank[base + (b ^ col)] = v;
        }
        Ok(())
    }

    /// Element view for host-side loads and inspection; not part of the
    /// modeled datapath.
    pub fn peek(&self, page: u32, row: usize, col: usize) -> Result<u32, AccelError> {
        let base = self.page_base(page)?;
        let b = self.geometry.bank(row, col);
        Ok(self.banks[b][base + row])
    }

    pub fn poke(&mut self, page: u32, row: usize, col: usize, word: u32) -> Result<(), AccelError> {
        let base = self.page_base(page)?;
        let b = self.geometry.bank(row, col);
        self.banks[b][base + row] = word;
        Ok(())
    }

    /// Snapshot of the whole memory, bank-major, each word little-endian.
    pub fn dump(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.total_words() * 4);
        for bank in &self.banks {
            for &w in bank {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out
    }

    pub fn load(&mut self, bytes: &[u8]) {
        assert_eq!(bytes.len(), self.total_words() * 4);
        let mut it = bytes.chunks_exact(4);
        for bank in self.banks.iter_mut() {
            for w in bank.iter_mut() {
                let chunk = it.next().unwrap();
                *w = u32::from_le_bytes(chunk.try_into().unwrap());
            }
        }
    }
}
