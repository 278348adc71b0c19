//! MovingAI `.map` and `.scen` text formats.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid cell; `x` is the column and `y` the row, as in MovingAI files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
    /// Row-major passability.
    pub passable: Vec<bool>,
    /// Optional row-major heights, used by the time-energy objectives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<u32>>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, passable: Vec<bool>) -> Result<Self> {
        if passable.len() != width * height {
            return Err(Error::Config(format!(
                "{} cells for a {width}x{height} grid",
                passable.len()
            )));
        }
        if !passable.iter().any(|p| *p) {
            return Err(Error::Config("grid has no passable cell".into()));
        }
        Ok(GridMap {
            width,
            height,
            passable,
            heights: None,
        })
    }

    /// An obstacle-free `width` x `height` grid.
    pub fn open(width: usize, height: usize) -> Self {
        GridMap::new(width, height, vec![true; width * height]).expect("non-empty grid")
    }

    pub fn with_heights(mut self, heights: Vec<u32>) -> Result<Self> {
        if heights.len() != self.width * self.height {
            return Err(Error::Config("height map size does not match grid".into()));
        }
        self.heights = Some(heights);
        Ok(self)
    }

    #[inline]
    pub fn index(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn is_passable(&self, c: Cell) -> bool {
        self.contains(c) && self.passable[self.index(c)]
    }

    pub fn passable_count(&self) -> usize {
        self.passable.iter().filter(|p| **p).count()
    }
}

fn header_value(line: Option<(usize, &str)>, key: &str) -> Result<usize> {
    let (no, text) = line.ok_or_else(|| Error::parse(0, format!("missing `{key}` header")))?;
    let mut parts = text.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v
            .parse()
            .map_err(|_| Error::parse(no, format!("`{key}` value `{v}` is not an integer"))),
        _ => Err(Error::parse(
            no,
            format!("expected `{key} <n>`, found `{text}`"),
        )),
    }
}

/// Parses a MovingAI `.map` file.
///
/// `.` and `G` are passable; `@`, `O` and `T` are blocked. Any other cell
/// character is rejected.
pub fn load_map(text: &str) -> Result<GridMap> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, l)) if l.split_whitespace().next() == Some("type") => {}
        Some((no, l)) => {
            return Err(Error::parse(
                no,
                format!("expected `type` header, found `{l}`"),
            ))
        }
        None => return Err(Error::parse(1, "empty map file")),
    }
    let height = header_value(lines.next(), "height")?;
    let width = header_value(lines.next(), "width")?;
    match lines.next() {
        Some((_, "map")) => {}
        Some((no, l)) => return Err(Error::parse(no, format!("expected `map`, found `{l}`"))),
        None => return Err(Error::parse(4, "missing `map` line")),
    }
    let mut passable = Vec::with_capacity(width * height);
    let mut last_line = 4;
    for row in 0..height {
        let (no, l) = lines.next().ok_or_else(|| {
            Error::parse(
                last_line + 1,
                format!("expected {height} rows, found {row}"),
            )
        })?;
        last_line = no;
        if l.chars().count() != width {
            return Err(Error::parse(
                no,
                format!("row has {} cells, expected {width}", l.chars().count()),
            ));
        }
        for ch in l.chars() {
            passable.push(match ch {
                '.' | 'G' => true,
                '@' | 'O' | 'T' => false,
                other => {
                    return Err(Error::parse(
                        no,
                        format!("unknown cell character `{other}`"),
                    ))
                }
            });
        }
    }
    if let Some((no, l)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::parse(
            no,
            format!("unexpected trailing content `{l}`"),
        ));
    }
    GridMap::new(width, height, passable).map_err(|e| Error::parse(last_line, e.to_string()))
}

pub fn write_map(grid: &GridMap) -> String {
    let mut out = format!(
        "type octile\nheight {}\nwidth {}\nmap\n",
        grid.height, grid.width
    );
    for y in 0..grid.height {
        for x in 0..grid.width {
            out.push(if grid.passable[y * grid.width + x] {
                '.'
            } else {
                '@'
            });
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub start: Cell,
    pub goal: Cell,
}

/// Parses a MovingAI `.scen` file and returns the first `count` start/goal
/// pairs in file order.
pub fn load_scenario(text: &str, count: usize) -> Result<Vec<ScenarioEntry>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, l)) if l.trim().starts_with("version") => {}
        Some((no, l)) => {
            return Err(Error::parse(
                no,
                format!("expected `version` header, found `{l}`"),
            ))
        }
        None => return Err(Error::parse(1, "empty scenario file")),
    }
    let mut out = Vec::with_capacity(count);
    let mut rows = 0;
    for (no, l) in lines {
        if out.len() == count {
            break;
        }
        if l.trim().is_empty() {
            continue;
        }
        rows += 1;
        let fields: Vec<&str> = l.split('\t').collect();
        let fields = if fields.len() == 9 {
            fields
        } else {
            l.split_whitespace().collect()
        };
        if fields.len() != 9 {
            return Err(Error::parse(
                no,
                format!("expected 9 fields, found {}", fields.len()),
            ));
        }
        let int = |i: usize, name: &str| -> Result<usize> {
            fields[i].parse().map_err(|_| {
                Error::parse(
                    no,
                    format!("{name} `{}` is not a non-negative integer", fields[i]),
                )
            })
        };
        let (w, h) = (int(2, "width")?, int(3, "height")?);
        let start = Cell {
            x: int(4, "start x")?,
            y: int(5, "start y")?,
        };
        let goal = Cell {
            x: int(6, "goal x")?,
            y: int(7, "goal y")?,
        };
        for (what, c) in [("start", start), ("goal", goal)] {
            if c.x >= w || c.y >= h {
                return Err(Error::parse(
                    no,
                    format!("{what} ({}, {}) lies outside the {w}x{h} map", c.x, c.y),
                ));
            }
        }
        out.push(ScenarioEntry { start, goal });
    }
    if out.len() < count {
        return Err(Error::Config(format!(
            "requested {count} agents but scenario has only {rows} rows"
        )));
    }
    Ok(out)
}

/// Serializes entries in `.scen` format; the optimal-length column is
/// written as 0 since it is not used here.
pub fn write_scenario(map_name: &str, grid: &GridMap, entries: &[ScenarioEntry]) -> String {
    let mut out = String::from("version 1\n");
    for e in entries {
        writeln!(
            out,
            "0\t{map_name}\t{}\t{}\t{}\t{}\t{}\t{}\t0",
            grid.width, grid.height, e.start.x, e.start.y, e.goal.x, e.goal.y
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_open_map() {
        let g = load_map("type octile\nheight 2\nwidth 2\nmap\n..\n..\n").unwrap();
        assert_eq!((g.width, g.height), (2, 2));
        assert!(g.passable.iter().all(|p| *p));
    }

    #[test]
    fn blocked_cell() {
        let g = load_map("type octile\nheight 2\nwidth 3\nmap\n.@.\nG..\n").unwrap();
        assert!(!g.is_passable(Cell { x: 1, y: 0 }));
        assert_eq!(g.passable_count(), 5);
    }

    #[test]
    fn short_map_reports_line() {
        let mut text = String::from("type octile\nheight 16\nwidth 2\nmap\n");
        for _ in 0..15 {
            text.push_str("..\n");
        }
        match load_map(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 20),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_rows_and_chars() {
        assert!(matches!(
            load_map("type octile\nheight 1\nwidth 2\nmap\n...\n"),
            Err(Error::Parse { line: 5, .. })
        ));
        assert!(matches!(
            load_map("type octile\nheight 1\nwidth 2\nmap\n.S\n"),
            Err(Error::Parse { line: 5, .. })
        ));
        assert!(matches!(
            load_map("type octile\nheigth 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    fn scen(rows: usize) -> String {
        let grid = GridMap::open(8, 8);
        let entries: Vec<_> = (0..rows)
            .map(|i| ScenarioEntry {
                start: Cell { x: i % 8, y: 0 },
                goal: Cell { x: 7 - i % 8, y: 7 },
            })
            .collect();
        write_scenario("open-8-8.map", &grid, &entries)
    }

    #[test]
    fn scenario_prefix() {
        let all = load_scenario(&scen(10), 10).unwrap();
        let four = load_scenario(&scen(10), 4).unwrap();
        assert_eq!(four, all[..4].to_vec());
        assert!(load_scenario(&scen(10), 0).unwrap().is_empty());
        assert!(matches!(load_scenario(&scen(3), 4), Err(Error::Config(_))));
    }

    #[test]
    fn scenario_errors() {
        let bad = "version 1\n0\tm\t8\t8\tx\t0\t1\t1\t0\n";
        assert!(matches!(
            load_scenario(bad, 1),
            Err(Error::Parse { line: 2, .. })
        ));
        let outside = "version 1\n0\tm\t8\t8\t9\t0\t1\t1\t0\n";
        assert!(matches!(
            load_scenario(outside, 1),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(load_scenario("version 1\n0\tm\t8\n", 1).is_err());
    }

    #[test]
    fn map_roundtrip() {
        let g = load_map("type octile\nheight 2\nwidth 3\nmap\n.@.\nT..\n").unwrap();
        assert_eq!(load_map(&write_map(&g)).unwrap(), g);
    }
}
