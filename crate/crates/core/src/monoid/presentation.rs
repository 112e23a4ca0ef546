//! Text presentations `a,b | a2=1, b3=b` used to check computed tables.

use std::fmt;
use std::str::FromStr;

use super::{BipartiteMonoid, MonoidError};

/// Exponent vector over the generators of a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word(pub Vec<u32>);

impl Word {
    /// Parses `1` or a product of generator letters with optional exponents,
    /// e.g. `ab2c`.
    pub fn parse(text: &str, generators: &[char]) -> Result<Word, MonoidError> {
        let text = text.trim();
        let mut exps = vec![0u32; generators.len()];
        if text == "1" {
            return Ok(Word(exps));
        }
        if text.is_empty() {
            return Err(MonoidError::Presentation("empty word".into()));
        }
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            let g = generators
                .iter()
                .position(|&x| x == c)
                .ok_or_else(|| MonoidError::Presentation(format!("unknown generator `{c}`")))?;
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let e: u32 = if digits.is_empty() {
                1
            } else {
                digits
                    .parse()
                    .map_err(|_| MonoidError::Presentation(format!("bad exponent `{digits}`")))?
            };
            exps[g] += e;
        }
        Ok(Word(exps))
    }

    /// Image of the word under `images[i]` for generator `i`.
    pub fn evaluate(&self, m: &BipartiteMonoid, images: &[usize]) -> usize {
        self.0
            .iter()
            .zip(images)
            .fold(m.identity(), |acc, (&e, &g)| m.mul(acc, m.pow(g, e as u64)))
    }

    fn render(&self, generators: &[char]) -> String {
        let mut s = String::new();
        for (&e, &g) in self.0.iter().zip(generators) {
            match e {
                0 => {}
                1 => s.push(g),
                _ => {
                    s.push(g);
                    s.push_str(&e.to_string());
                }
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<char>,
    pub relations: Vec<(Word, Word)>,
}

impl Presentation {
    pub fn new(generators: Vec<char>, relations: &[&str]) -> Result<Self, MonoidError> {
        let relations = relations
            .iter()
            .map(|r| {
                let (l, rhs) = r
                    .split_once('=')
                    .ok_or_else(|| MonoidError::Presentation(format!("relation `{r}` has no `=`")))?;
                Ok((Word::parse(l, &generators)?, Word::parse(rhs, &generators)?))
            })
            .collect::<Result<_, MonoidError>>()?;
        Ok(Presentation {
            generators,
            relations,
        })
    }

    /// Parses a list of words such as a `P` listing.
    pub fn words(&self, list: &str) -> Result<Vec<Word>, MonoidError> {
        list.split(',')
            .filter(|w| !w.trim().is_empty())
            .map(|w| Word::parse(w, &self.generators))
            .collect()
    }
}

impl FromStr for Presentation {
    type Err = MonoidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (gens, rels) = s
            .split_once('|')
            .ok_or_else(|| MonoidError::Presentation("missing `|`".into()))?;
        let mut generators = Vec::new();
        for g in gens.split(',') {
            let g = g.trim();
            let mut cs = g.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => generators.push(c),
                _ => return Err(MonoidError::Presentation(format!("bad generator `{g}`"))),
            }
        }
        let rels: Vec<&str> = rels.split(',').map(str::trim).filter(|r| !r.is_empty()).collect();
        Presentation::new(generators, &rels)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(char::to_string).collect();
        write!(f, "{} |", gens.join(","))?;
        for (i, (l, r)) in self.relations.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}={}", l.render(&self.generators), r.render(&self.generators))?;
        }
        Ok(())
    }
}

/// True iff every relation holds under the generator images and the images
/// generate all of `m`.
pub fn check_presentation(
    m: &BipartiteMonoid,
    images: &[usize],
    pres: &Presentation,
) -> Result<bool, MonoidError> {
    if images.len() != pres.generators.len() {
        return Err(MonoidError::GeneratorCount {
            expected: pres.generators.len(),
            got: images.len(),
        });
    }
    if let Some(&x) = images.iter().find(|&&x| x >= m.size()) {
        return Err(MonoidError::BadP(x));
    }
    let relations_hold = pres
        .relations
        .iter()
        .all(|(l, r)| l.evaluate(m, images) == r.evaluate(m, images));
    Ok(relations_hold && m.generated(images).iter().all(|&b| b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{make_r8, make_tn};

    #[test]
    fn parse_and_render() {
        let p: Presentation = "a,b | a2=1, b3=b".parse().unwrap();
        assert_eq!(p.generators, ['a', 'b']);
        assert_eq!(p.relations[0], (Word(vec![2, 0]), Word(vec![0, 0])));
        assert_eq!(p.to_string(), "a,b | a2=1, b3=b");
        assert_eq!(Word::parse("ab2a", &['a', 'b']).unwrap(), Word(vec![2, 2]));
        assert!("a,b | c=1".parse::<Presentation>().is_err());
        assert!("a,b".parse::<Presentation>().is_err());
    }

    #[test]
    fn t2_presentation() {
        let t2 = make_tn(2).unwrap();
        let p: Presentation = "a,b | a2=1, b3=b".parse().unwrap();
        let a = t2.element("a").unwrap();
        let b = t2.element("b").unwrap();
        assert!(check_presentation(&t2, &[a, b], &p).unwrap());
        assert!(!check_presentation(&t2, &[a, a], &p).unwrap());
        assert!(check_presentation(&t2, &[a], &p).is_err());
    }

    #[test]
    fn r8_presentation() {
        let r8 = make_r8();
        let p: Presentation = "a,b,t | a2=1, b3=b, t2=b2, bt=b".parse().unwrap();
        let imgs: Vec<usize> = ["a", "b", "t"].iter().map(|l| r8.element(l).unwrap()).collect();
        assert!(check_presentation(&r8, &imgs, &p).unwrap());
        let ps: Vec<usize> = p
            .words("a, b2")
            .unwrap()
            .iter()
            .map(|w| w.evaluate(&r8, &imgs))
            .collect();
        assert_eq!(ps, r8.p_elements());
    }
}
