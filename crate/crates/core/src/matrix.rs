use alloc::vec;
use alloc::vec::Vec;

/// Row-major `rows × cols` table of reals, one row per timestep.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SeriesMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape mismatch");
        SeriesMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.cols + col] = v;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(col).step_by(self.cols.max(1)).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Rich per-cell label.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
#[repr(u8)]
pub enum Label {
    #[default]
    Normal = 0,
    /// The variable's own equation is replaced on this timestep.
    Anomalous = 1,
    /// A parent read by this cell is corrupted but the edge does not
    /// propagate, so the value itself is untouched.
    ParentNotPropagated = 2,
    /// A corrupted parent value flowed into this cell.
    ParentPropagated = 3,
}

impl Label {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// Binary view: 1 when the value itself is corrupted.
    pub fn is_abnormal(self) -> bool {
        matches!(self, Label::Anomalous | Label::ParentPropagated)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Label>,
}

impl LabelMatrix {
    pub fn normal(rows: usize, cols: usize) -> Self {
        LabelMatrix {
            rows,
            cols,
            data: vec![Label::Normal; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Label {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, l: Label) {
        self.data[row * self.cols + col] = l;
    }

    pub fn row(&self, row: usize) -> &[Label] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// 0/1 codes: 1 iff the rich label is 1 or 3.
    pub fn binary(&self) -> Vec<u8> {
        self.data.iter().map(|l| l.is_abnormal() as u8).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.data.iter().filter(|l| **l == label).count()
    }
}
