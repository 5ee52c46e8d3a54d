use std::str::FromStr;

/// Evenly spaced values written `start:end:count`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, count] = parts[..] else {
            return Err(format!("expected start:end:count, got `{s}`"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let (start, end) = (num(start)?, num(end)?);
        let count: usize = count.trim().parse().map_err(|_| format!("`{count}` is not a count"))?;
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        if !start.is_finite() || !end.is_finite() {
            return Err("grid endpoints must be finite".into());
        }
        if count == 1 && start != end {
            return Err("a one-point grid needs start == end".into());
        }
        Ok(Grid { start, end, count })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_spaces() {
        let g: Grid = "0.5:2:4".parse().unwrap();
        assert_eq!(g.values(), vec![0.5, 1.0, 1.5, 2.0]);
        let g: Grid = "1.1:1.1:1".parse().unwrap();
        assert_eq!(g.values(), vec![1.1]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["1:2", "a:2:3", "1:2:0", "1:2:x", "1:2:1"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
