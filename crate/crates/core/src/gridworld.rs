//! Discrete grid MDP with nine actions and slip dynamics.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::predicate::{Domain, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("map line {line}: {message}")]
    Map { line: usize, message: String },
    #[error("cell {0} is outside the grid")]
    OutOfBounds(Cell),
    #[error("cell {0} is an obstacle")]
    Obstacle(Cell),
    #[error("invalid grid: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
}

impl Cell {
    pub const fn new(x: i64, y: i64) -> Self {
        Cell { x, y }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

pub const ACTION_COUNT: usize = 9;

/// The eight compass moves, clockwise from up, followed by staying put.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Action {
    Up = 0,
    UpRight = 1,
    Right = 2,
    DownRight = 3,
    Down = 4,
    DownLeft = 5,
    Left = 6,
    UpLeft = 7,
    Stay = 8,
}

impl Action {
    pub const ALL: [Action; ACTION_COUNT] = [
        Action::Up,
        Action::UpRight,
        Action::Right,
        Action::DownRight,
        Action::Down,
        Action::DownLeft,
        Action::Left,
        Action::UpLeft,
        Action::Stay,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn delta(self) -> (i64, i64) {
        match self {
            Action::Up => (0, 1),
            Action::UpRight => (1, 1),
            Action::Right => (1, 0),
            Action::DownRight => (1, -1),
            Action::Down => (0, -1),
            Action::DownLeft => (-1, -1),
            Action::Left => (-1, 0),
            Action::UpLeft => (-1, 1),
            Action::Stay => (0, 0),
        }
    }

    /// The two compass directions 45 degrees either side; `None` for `Stay`.
    pub fn neighbours(self) -> Option<(Action, Action)> {
        if self == Action::Stay {
            return None;
        }
        let i = self.index();
        Some((Action::ALL[(i + 7) % 8], Action::ALL[(i + 1) % 8]))
    }
}

/// Outcome cells with their probabilities; cells are distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDistribution {
    outcomes: Vec<(Cell, f64)>,
}

impl TransitionDistribution {
    pub fn outcomes(&self) -> &[(Cell, f64)] {
        &self.outcomes
    }

    pub fn probability(&self, cell: Cell) -> f64 {
        self.outcomes
            .iter()
            .find(|(c, _)| *c == cell)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    fn push(&mut self, cell: Cell, p: f64) {
        if p <= 0.0 {
            return;
        }
        match self.outcomes.iter_mut().find(|(c, _)| *c == cell) {
            Some((_, q)) => *q += p,
            None => self.outcomes.push((cell, p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    width: usize,
    height: usize,
    start: Cell,
    obstacles: Vec<bool>,
    p_slip: f64,
}

impl GridWorld {
    pub fn new(
        width: usize,
        height: usize,
        start: Cell,
        obstacles: impl IntoIterator<Item = Cell>,
        p_slip: f64,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Invalid("width and height must be positive".into()));
        }
        if !(0.0..=1.0).contains(&p_slip) {
            return Err(GridError::Invalid(format!("p_slip {p_slip} outside [0, 1]")));
        }
        let mut grid = GridWorld {
            width,
            height,
            start,
            obstacles: vec![false; width * height],
            p_slip,
        };
        for cell in obstacles {
            if !grid.in_bounds(cell) {
                return Err(GridError::OutOfBounds(cell));
            }
            let idx = grid.cell_index(cell);
            grid.obstacles[idx] = true;
        }
        if !grid.in_bounds(start) {
            return Err(GridError::OutOfBounds(start));
        }
        if grid.is_obstacle(start) {
            return Err(GridError::Obstacle(start));
        }
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn p_slip(&self) -> f64 {
        self.p_slip
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height
    }

    pub fn is_obstacle(&self, c: Cell) -> bool {
        self.in_bounds(c) && self.obstacles[self.cell_index(c)]
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.obstacles[self.cell_index(c)]
    }

    pub fn obstacles(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells().filter(|&c| self.is_obstacle(c))
    }

    /// Row-major index with `y` as the row.
    pub fn cell_index(&self, c: Cell) -> usize {
        c.y as usize * self.width + c.x as usize
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new((index % self.width) as i64, (index / self.width) as i64)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cell_count()).map(|i| self.cell_at(i))
    }

    /// The `x`/`y` domain spanned by this grid.
    pub fn domain(&self) -> Domain {
        Domain::grid(self.width, self.height)
    }

    pub fn transition_dist(&self, s: Cell, a: Action) -> Result<TransitionDistribution, GridError> {
        if !self.in_bounds(s) {
            return Err(GridError::OutOfBounds(s));
        }
        if self.is_obstacle(s) {
            return Err(GridError::Obstacle(s));
        }
        let mut dist = TransitionDistribution {
            outcomes: Vec::with_capacity(3),
        };
        let land = |dir: Action| {
            let (dx, dy) = dir.delta();
            let target = Cell::new(s.x + dx, s.y + dy);
            if self.is_free(target) {
                target
            } else {
                s
            }
        };
        match a.neighbours() {
            None => dist.push(s, 1.0),
            Some((left, right)) => {
                dist.push(land(a), 1.0 - self.p_slip);
                dist.push(land(left), 0.5 * self.p_slip);
                dist.push(land(right), 0.5 * self.p_slip);
            }
        }
        Ok(dist)
    }

    pub fn sample_step<R: Rng + ?Sized>(
        &self,
        s: Cell,
        a: Action,
        rng: &mut R,
    ) -> Result<Cell, GridError> {
        let dist = self.transition_dist(s, a)?;
        Ok(sample_outcome(dist.outcomes(), rng))
    }

    /// Parses the map format: `width=`, `height=`, `p_slip=` headers followed
    /// by `height` rows of `.`, `#` and a single `S`, top row first.
    pub fn load_map(text: &str) -> Result<Self, GridError> {
        let mut width = None;
        let mut height = None;
        let mut p_slip = None;
        let mut rows: Vec<(usize, &str)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                let err = |message: String| GridError::Map {
                    line: line_no,
                    message,
                };
                let value = value.trim();
                match key.trim() {
                    "width" => width = Some(value.parse::<usize>().map_err(|e| err(e.to_string()))?),
                    "height" => height = Some(value.parse::<usize>().map_err(|e| err(e.to_string()))?),
                    "p_slip" => p_slip = Some(value.parse::<f64>().map_err(|e| err(e.to_string()))?),
                    other => return Err(err(format!("unknown header `{other}`"))),
                }
                continue;
            }
            rows.push((line_no, line));
        }
        let width = width.ok_or_else(|| missing("width"))?;
        let height = height.ok_or_else(|| missing("height"))?;
        let p_slip = p_slip.unwrap_or(0.1);
        if rows.len() != height {
            return Err(GridError::Invalid(format!(
                "expected {height} grid rows, found {}",
                rows.len()
            )));
        }
        let mut start = None;
        let mut obstacles = Vec::new();
        for (row_idx, (line_no, row)) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(GridError::Map {
                    line: *line_no,
                    message: format!("row has {} cells, expected {width}", row.chars().count()),
                });
            }
            let y = (height - 1 - row_idx) as i64;
            for (x, ch) in row.chars().enumerate() {
                let cell = Cell::new(x as i64, y);
                match ch {
                    '.' => {}
                    '#' => obstacles.push(cell),
                    'S' => {
                        if start.replace(cell).is_some() {
                            return Err(GridError::Map {
                                line: *line_no,
                                message: "more than one start cell".into(),
                            });
                        }
                    }
                    other => {
                        return Err(GridError::Map {
                            line: *line_no,
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                }
            }
        }
        let start = start.ok_or_else(|| GridError::Invalid("map has no start cell `S`".into()))?;
        GridWorld::new(width, height, start, obstacles, p_slip)
    }

    pub fn to_map(&self) -> String {
        let mut out = format!(
            "width={}\nheight={}\np_slip={}\n",
            self.width, self.height, self.p_slip
        );
        for y in (0..self.height as i64).rev() {
            for x in 0..self.width as i64 {
                let c = Cell::new(x, y);
                out.push(if c == self.start {
                    'S'
                } else if self.is_obstacle(c) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }
}

fn missing(key: &str) -> GridError {
    GridError::Invalid(format!("missing `{key}=` header"))
}

impl FromStr for GridWorld {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GridWorld::load_map(s)
    }
}

pub(crate) fn sample_outcome<T: Copy, R: Rng + ?Sized>(outcomes: &[(T, f64)], rng: &mut R) -> T {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(item, p) in outcomes {
        acc += p;
        if u < acc {
            return item;
        }
    }
    outcomes[outcomes.len() - 1].0
}

pub fn valuation_of(s: Cell) -> Valuation {
    Valuation::new([s.x, s.y])
}
