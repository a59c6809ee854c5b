//! A desk-scale stand-in for real text.
//!
//! [`clean_corpus`] samples lowercase English sentences from a small
//! hand-written grammar: agreement, tense, articles, prepositional verbs,
//! comparatives, questions and compound clauses. [`learner_corrupt`] adds
//! the kinds of mistakes language learners make (dropped articles, wrong
//! prepositions, agreement and verb-form errors, number errors, typos).
//! Both are deterministic in their seed.

use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seed::rng_for;
use crate::text::{detokenize, PairSource, Sentence, SentencePair};

// sg pl tags [prep]; pl "-" marks an uncountable noun.
// tags: p person, a animal, t thing, r readable, o openable, f food,
// d drink, m music/media, l place, x abstract
const NOUNS: &str = "
friend friends p
teacher teachers p
student students p
doctor doctors p
child children p
man men p
woman women p
boy boys p
girl girls p
brother brothers p
sister sisters p
neighbor neighbors p
driver drivers p
farmer farmers p
baby babies p
uncle uncles p
aunt aunts p
cousin cousins p
manager managers p
nurse nurses p
waiter waiters p
artist artists p
player players p
engineer engineers p
officer officers p
person people p
cat cats a
dog dogs a
horse horses a
bird birds a
rabbit rabbits a
cow cows a
mouse mice a
fox foxes a
duck ducks a
lion lions a
monkey monkeys a
elephant elephants a
owl owls a
tiger tigers a
book books tr
letter letters tr
newspaper newspapers tr
story stories tr
email emails tr
magazine magazines tr
car cars t
bike bikes t
phone phones t
key keys t
bag bags to
box boxes to
cup cups t
chair chairs t
table tables t
picture pictures t
camera cameras t
computer computers t
ticket tickets t
umbrella umbrellas to
map maps t
ball balls t
toy toys t
window windows to
door doors to
shirt shirts t
watch watches t
glass glasses t
bottle bottles to
present presents to
question questions x
game games xm
idea ideas x
dress dresses t
photo photos t
lamp lamps t
pen pens t
coat coats t
shoe shoes t
egg eggs f
apple apples f
orange oranges f
banana bananas f
cake cakes f
sandwich sandwiches f
cookie cookies f
bread - f
rice - f
soup - f
cheese - f
pasta - f
fruit - f
water - d
milk - d
tea - d
coffee - d
juice - d
music - m
song songs m
movie movies m
homework - x
money - t
information - x
advice - x
furniture - t
park parks l in
garden gardens l in
kitchen kitchens l in
library libraries l in
office offices l in
city cities l in
village villages l in
room rooms l in
shop shops l in
hospital hospitals l in
museum museums l in
restaurant restaurants l in
station stations l at
airport airports l at
school schools l at
market markets l at
cinema cinemas l at
bank banks l at
hotel hotels l at
beach beaches l on
farm farms l on
island islands l on
street streets l on
bridge bridges l on
";

// base s3 past ing pp frame objtags prep animal
// frames: i intransitive, m motion, t transitive, p prepositional, g ditransitive
const VERBS: &str = "
sleep sleeps slept sleeping slept i - - y
work works worked working worked i - - n
play plays played playing played i - - y
study studies studied studying studied i - - n
live lives lived living lived i - - y
sing sings sang singing sung i - - y
dance dances danced dancing danced i - - n
swim swims swam swimming swum i - - y
laugh laughs laughed laughing laughed i - - n
sit sits sat sitting sat i - - y
stay stays stayed staying stayed i - - y
rest rests rested resting rested i - - y
go goes went going gone m - - y
walk walks walked walking walked m - - y
run runs ran running run m - - y
drive drives drove driving driven m - - n
travel travels traveled traveling traveled m - - n
come comes came coming come m - - y
return returns returned returning returned m - - n
hurry hurries hurried hurrying hurried m - - y
eat eats ate eating eaten t f - y
cook cooks cooked cooking cooked t f - n
buy buys bought buying bought t tf - n
sell sells sold selling sold t t - n
read reads read reading read t r - n
write writes wrote writing written t r - n
find finds found finding found t ta - y
lose loses lost losing lost t t - n
open opens opened opening opened t o - n
clean cleans cleaned cleaning cleaned t tl - n
see sees saw seeing seen t ptal - y
watch watches watched watching watched t am - y
like likes liked liking liked t ptfdma - y
love loves loved loving loved t pfdma - y
need needs needed needing needed t tx - y
want wants wanted wanting wanted t tfd - y
carry carries carried carrying carried t t - y
bring brings brought bringing brought t tf - y
visit visits visited visiting visited t pl - n
help helps helped helping helped t p - y
call calls called calling called t p - n
meet meets met meeting met t p - n
feed feeds fed feeding fed t a - n
drink drinks drank drinking drunk t d - y
make makes made making made t tf - n
fix fixes fixed fixing fixed t t - n
paint paints painted painting painted t tl - n
catch catches caught catching caught t a - y
draw draws drew drawing drawn t at - n
listen listens listened listening listened p mp to y
look looks looked looking looked p ptal at y
wait waits waited waiting waited p p for y
talk talks talked talking talked p p to n
think thinks thought thinking thought p ptx about n
worry worries worried worrying worried p px about n
ask asks asked asking asked p tx for n
agree agrees agreed agreeing agreed p p with n
give gives gave giving given g t - n
send sends sent sending sent g tr - n
show shows showed showing shown g t - n
lend lends lent lending lent g t - n
";

// base comparative
const ADJECTIVES: &str = "
big bigger
small smaller
old older
new newer
young younger
happy happier
sad sadder
tired -
hungry -
busy busier
quiet quieter
noisy noisier
beautiful -
clean cleaner
dirty dirtier
red -
blue -
green -
black -
white -
cold colder
hot hotter
warm warmer
expensive -
cheap cheaper
heavy heavier
long longer
short shorter
tall taller
funny funnier
strange -
friendly -
angry angrier
kind kinder
famous -
interesting -
boring -
empty -
easy easier
important -
";

const NAMES: &[&str] = &[
    "Alice", "Bob", "Maria", "John", "Anna", "Tom", "Sara", "David", "Emma", "Peter", "Lucy", "Ben",
];
const POSSESSIVES: &[&str] = &["my", "his", "her", "our", "their", "your"];
const PRE_ADVERBS: &[&str] = &["usually", "often", "always", "sometimes"];
const MODALS: &[&str] = &["can", "should", "must", "might"];
const ARTICLES: &[&str] = &["a", "an", "the"];
const CONFUSABLE_PREPS: &[&str] = &["in", "on", "at", "to", "for", "with", "about", "of", "from"];

#[derive(Debug)]
struct Noun {
    sg: &'static str,
    pl: Option<&'static str>,
    tags: &'static str,
    prep: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Frame {
    Intransitive,
    Motion,
    Transitive,
    Prepositional,
    Ditransitive,
}

#[derive(Debug)]
struct Verb {
    base: &'static str,
    s3: &'static str,
    past: &'static str,
    ing: &'static str,
    pp: &'static str,
    frame: Frame,
    objects: &'static str,
    prep: &'static str,
    animal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VerbForm {
    Base,
    S3,
    Past,
    Ing,
    Pp,
}

struct Lexicon {
    nouns: Vec<Noun>,
    verbs: Vec<Verb>,
    adjectives: Vec<(&'static str, Option<&'static str>)>,
    verb_forms: HashMap<&'static str, Vec<(usize, VerbForm)>>,
    noun_number: HashMap<&'static str, &'static str>,
    open_words: HashSet<&'static str>,
}

fn opt(s: &'static str) -> Option<&'static str> {
    (s != "-").then_some(s)
}

static LEXICON: LazyLock<Lexicon> = LazyLock::new(|| {
    let nouns: Vec<Noun> = NOUNS
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&'static str> = l.split_whitespace().collect();
            Noun {
                sg: f[0],
                pl: opt(f[1]),
                tags: f[2],
                prep: f.get(3).copied().unwrap_or("in"),
            }
        })
        .collect();
    let verbs: Vec<Verb> = VERBS
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&'static str> = l.split_whitespace().collect();
            Verb {
                base: f[0],
                s3: f[1],
                past: f[2],
                ing: f[3],
                pp: f[4],
                frame: match f[5] {
                    "i" => Frame::Intransitive,
                    "m" => Frame::Motion,
                    "t" => Frame::Transitive,
                    "p" => Frame::Prepositional,
                    _ => Frame::Ditransitive,
                },
                objects: f[6],
                prep: f[7],
                animal: f[8] == "y",
            }
        })
        .collect();
    let adjectives = ADJECTIVES
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&'static str> = l.split_whitespace().collect();
            (f[0], opt(f[1]))
        })
        .collect::<Vec<_>>();
    let mut verb_forms: HashMap<&'static str, Vec<(usize, VerbForm)>> = HashMap::new();
    for (i, v) in verbs.iter().enumerate() {
        for (w, form) in [
            (v.base, VerbForm::Base),
            (v.s3, VerbForm::S3),
            (v.past, VerbForm::Past),
            (v.ing, VerbForm::Ing),
            (v.pp, VerbForm::Pp),
        ] {
            verb_forms.entry(w).or_default().push((i, form));
        }
    }
    let mut noun_number = HashMap::new();
    let mut open_words = HashSet::new();
    for n in &nouns {
        open_words.insert(n.sg);
        if let Some(pl) = n.pl {
            noun_number.insert(n.sg, pl);
            noun_number.insert(pl, n.sg);
            open_words.insert(pl);
        }
    }
    open_words.extend(verb_forms.keys().copied());
    for (a, c) in &adjectives {
        open_words.insert(a);
        open_words.extend(*c);
    }
    Lexicon {
        nouns,
        verbs,
        adjectives,
        verb_forms,
        noun_number,
        open_words,
    }
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tense {
    Present,
    Past,
    Progressive,
    PastProgressive,
    Future,
    Perfect,
    Modal,
}

/// Person and number of a subject, enough for agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Agr {
    First,
    ThirdSg,
    Plural,
}

struct Gen {
    rng: ChaCha8Rng,
    /// Nesting level of noun-phrase modifiers.
    depth: u8,
    out: Vec<String>,
}

impl Gen {
    fn push(&mut self, w: &str) {
        self.out.push(w.to_string());
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn pick<'s>(&mut self, xs: &[&'s str]) -> &'s str {
        xs.choose(&mut self.rng).copied().unwrap_or("")
    }

    fn noun_with(&mut self, tags: &str) -> &'static Noun {
        let lex: &'static Lexicon = &LEXICON;
        let pool: Vec<&'static Noun> = lex
            .nouns
            .iter()
            .filter(|n| n.tags.chars().any(|t| tags.contains(t)))
            .collect();
        pool.choose(&mut self.rng)
            .copied()
            .expect("every tag has nouns")
    }

    fn adjective(&mut self) -> &'static str {
        let lex: &'static Lexicon = &LEXICON;
        lex.adjectives
            .choose(&mut self.rng)
            .map(|a| a.0)
            .unwrap_or("big")
    }

    /// A noun phrase drawn from nouns carrying any of `tags`. Returns its
    /// agreement class.
    fn noun_phrase(&mut self, tags: &str) -> Agr {
        if tags.contains('p') && self.chance(0.15) {
            let name = self.pick(NAMES);
            self.push(name);
            return Agr::ThirdSg;
        }
        let noun = self.noun_with(tags);
        let plural = noun.pl.is_some() && self.chance(0.4);
        let word = if plural {
            noun.pl.unwrap_or(noun.sg)
        } else {
            noun.sg
        };
        let adj = self.chance(0.3).then(|| self.adjective());
        let roll: f64 = self.rng.random();
        let det: Option<&str> = match (noun.pl.is_some(), plural) {
            (true, false) => Some(if roll < 0.35 {
                "a"
            } else if roll < 0.7 {
                "the"
            } else if roll < 0.9 {
                self.pick(POSSESSIVES)
            } else {
                self.pick(&["this", "that"])
            }),
            (true, true) => {
                if roll < 0.35 {
                    Some("the")
                } else if roll < 0.55 {
                    Some(self.pick(POSSESSIVES))
                } else if roll < 0.8 {
                    Some(self.pick(&["two", "three", "some", "many", "these", "those"]))
                } else {
                    None
                }
            }
            (false, _) => {
                if roll < 0.4 {
                    Some("the")
                } else if roll < 0.6 {
                    Some("some")
                } else if roll < 0.75 {
                    Some(self.pick(POSSESSIVES))
                } else {
                    None
                }
            }
        };
        let next = adj.unwrap_or(word);
        match det {
            Some("a") if next.starts_with(['a', 'e', 'i', 'o', 'u']) => self.push("an"),
            Some(d) => self.push(d),
            None => {}
        }
        if let Some(a) = adj {
            self.push(a);
        }
        self.push(word);
        let agr = if plural { Agr::Plural } else { Agr::ThirdSg };
        if self.depth == 0 {
            self.depth += 1;
            let roll: f64 = self.rng.random();
            if roll < 0.1 {
                self.relative_clause(noun, agr);
            } else if roll < 0.2 {
                let prep = self.pick(&["with", "from", "in", "on"]);
                self.push(prep);
                self.noun_phrase("tpl");
            }
            self.depth -= 1;
        }
        agr
    }

    fn relative_clause(&mut self, noun: &Noun, agr: Agr) {
        let lex: &'static Lexicon = &LEXICON;
        let tense = if self.chance(0.5) {
            Tense::Present
        } else {
            Tense::Past
        };
        if noun.tags.contains('p') || noun.tags.contains('a') {
            self.push(if noun.tags.contains('p') {
                "who"
            } else {
                "that"
            });
            let animal = noun.tags.contains('a');
            let pool: Vec<&'static Verb> = lex
                .verbs
                .iter()
                .filter(|v| (!animal || v.animal) && v.frame != Frame::Ditransitive)
                .collect();
            let v = *pool.choose(&mut self.rng).expect("verbs");
            self.verb_group(v, agr, tense, false);
            self.complement(v);
        } else {
            let pool: Vec<&'static Verb> = lex
                .verbs
                .iter()
                .filter(|v| {
                    v.frame == Frame::Transitive && noun.tags.chars().any(|t| v.objects.contains(t))
                })
                .collect();
            let Some(&v) = pool.choose(&mut self.rng) else {
                return;
            };
            self.push("that");
            let subj = self.subject(false);
            self.verb_group(v, subj, tense, false);
        }
    }

    fn subject(&mut self, animal_ok: bool) -> Agr {
        let roll: f64 = self.rng.random();
        if roll < 0.05 && self.depth == 0 {
            self.depth += 1;
            self.noun_phrase("p");
            self.push("and");
            self.noun_phrase("p");
            self.depth -= 1;
            Agr::Plural
        } else if roll < 0.3 {
            let (p, agr) = *[
                ("I", Agr::First),
                ("you", Agr::Plural),
                ("we", Agr::Plural),
                ("they", Agr::Plural),
                ("he", Agr::ThirdSg),
                ("she", Agr::ThirdSg),
            ]
            .choose(&mut self.rng)
            .expect("nonempty");
            self.push(p);
            agr
        } else if animal_ok && roll < 0.5 {
            self.noun_phrase("a")
        } else {
            self.noun_phrase("p")
        }
    }

    fn be(&mut self, agr: Agr, past: bool) {
        let w = match (agr, past) {
            (Agr::First, false) => "am",
            (Agr::ThirdSg, false) => "is",
            (Agr::Plural, false) => "are",
            (Agr::Plural, true) => "were",
            (_, true) => "was",
        };
        self.push(w);
    }

    fn place(&mut self, prep: Option<&str>) {
        let noun = self.noun_with("l");
        self.push(prep.unwrap_or(noun.prep));
        if self.chance(0.7) {
            self.push("the");
        } else {
            let p = self.pick(POSSESSIVES);
            self.push(p);
        }
        self.push(noun.sg);
    }

    fn time(&mut self, tense: Tense) {
        let options: &[&str] = match tense {
            Tense::Past => &[
                "yesterday",
                "last week",
                "last night",
                "two days ago",
                "this morning",
            ],
            Tense::Present => &["every day", "every morning", "on sundays", "at night"],
            Tense::Progressive => &["now", "right now", "at the moment", "today"],
            Tense::PastProgressive => &["yesterday", "last night", "at noon"],
            Tense::Future => &["tomorrow", "next week", "soon", "tonight"],
            Tense::Perfect => &["this week", "today", "recently"],
            Tense::Modal => &["today", "tomorrow", "now"],
        };
        let t = self.pick(options);
        for w in t.split(' ') {
            self.push(w);
        }
    }

    fn verb_group(&mut self, v: &Verb, agr: Agr, tense: Tense, negate: bool) {
        let third = agr == Agr::ThirdSg;
        match tense {
            Tense::Present => {
                if negate {
                    self.push(if third { "does" } else { "do" });
                    self.push("not");
                    self.push(v.base);
                } else {
                    if self.chance(0.15) {
                        let a = self.pick(PRE_ADVERBS);
                        self.push(a);
                    }
                    self.push(if third { v.s3 } else { v.base });
                }
            }
            Tense::Past => {
                if negate {
                    self.push("did");
                    self.push("not");
                    self.push(v.base);
                } else {
                    self.push(v.past);
                }
            }
            Tense::Progressive | Tense::PastProgressive => {
                self.be(agr, tense == Tense::PastProgressive);
                if negate {
                    self.push("not");
                }
                self.push(v.ing);
            }
            Tense::Future => {
                self.push("will");
                if negate {
                    self.push("not");
                }
                self.push(v.base);
            }
            Tense::Perfect => {
                self.push(if third { "has" } else { "have" });
                if negate {
                    self.push("not");
                } else if self.chance(0.2) {
                    self.push("already");
                }
                self.push(v.pp);
            }
            Tense::Modal => {
                let m = self.pick(MODALS);
                self.push(m);
                if negate {
                    self.push("not");
                }
                self.push(v.base);
            }
        }
    }

    fn complement(&mut self, v: &Verb) {
        match v.frame {
            Frame::Intransitive => {
                if self.chance(0.5) {
                    self.place(None);
                }
            }
            Frame::Motion => {
                if self.chance(0.15) {
                    self.push("home");
                } else {
                    self.place(Some("to"));
                }
            }
            Frame::Transitive => {
                self.noun_phrase(v.objects);
                if self.chance(0.25) {
                    self.place(None);
                }
            }
            Frame::Prepositional => {
                self.push(v.prep);
                self.noun_phrase(v.objects);
            }
            Frame::Ditransitive => {
                if self.chance(0.5) {
                    self.noun_phrase("p");
                    self.noun_phrase(v.objects);
                } else {
                    self.noun_phrase(v.objects);
                    self.push("to");
                    self.noun_phrase("p");
                }
            }
        }
    }

    fn tense(&mut self) -> Tense {
        let roll: f64 = self.rng.random();
        match roll {
            r if r < 0.30 => Tense::Present,
            r if r < 0.60 => Tense::Past,
            r if r < 0.70 => Tense::Progressive,
            r if r < 0.75 => Tense::PastProgressive,
            r if r < 0.85 => Tense::Future,
            r if r < 0.93 => Tense::Perfect,
            _ => Tense::Modal,
        }
    }

    fn clause(&mut self) {
        let lex: &'static Lexicon = &LEXICON;
        let animal_subject = self.chance(0.2);
        let pool: Vec<&'static Verb> = lex
            .verbs
            .iter()
            .filter(|v| !animal_subject || v.animal)
            .collect();
        let v = *pool.choose(&mut self.rng).expect("verbs");
        let agr = if animal_subject {
            self.noun_phrase("a")
        } else {
            self.subject(false)
        };
        let tense = self.tense();
        let negate = self.chance(0.08);
        self.verb_group(v, agr, tense, negate);
        self.complement(v);
        if self.chance(0.3) {
            self.time(tense);
        }
    }

    fn copula(&mut self) {
        let agr = self.noun_phrase("ptafdl");
        let past = self.chance(0.4);
        self.be(agr, past);
        if self.chance(0.08) {
            self.push("not");
        }
        if self.chance(0.2) {
            self.push("very");
        }
        let a = self.adjective();
        self.push(a);
    }

    fn comparative(&mut self) {
        let lex: &'static Lexicon = &LEXICON;
        let comparable: Vec<&'static str> = lex.adjectives.iter().filter_map(|a| a.1).collect();
        let tags = *["p", "a", "t", "l"]
            .choose(&mut self.rng)
            .expect("nonempty");
        let agr = self.noun_phrase(tags);
        let past = self.chance(0.3);
        self.be(agr, past);
        let c = self.pick(&comparable);
        self.push(c);
        self.push("than");
        self.noun_phrase(tags);
    }

    fn existential(&mut self) {
        self.push("there");
        let mark = self.out.len();
        self.push("is");
        let agr = self.noun_phrase("tafp");
        let past = self.chance(0.3);
        self.out[mark] = match (agr == Agr::Plural, past) {
            (true, false) => "are",
            (true, true) => "were",
            (false, false) => "is",
            (false, true) => "was",
        }
        .to_string();
        self.place(None);
    }

    fn question(&mut self) {
        let lex: &'static Lexicon = &LEXICON;
        if self.chance(0.3) {
            self.push("where");
            let mark = self.out.len();
            self.push("is");
            let agr = self.noun_phrase("ptao");
            if agr == Agr::Plural {
                self.out[mark] = "are".into();
            }
            return;
        }
        let pool: Vec<&'static Verb> = lex
            .verbs
            .iter()
            .filter(|v| matches!(v.frame, Frame::Transitive | Frame::Prepositional))
            .collect();
        let v = *pool.choose(&mut self.rng).expect("verbs");
        let mark = self.out.len();
        self.push("do");
        let agr = self.subject(false);
        let aux = match self.rng.random_range(0..3) {
            0 => "did",
            1 => "can",
            _ if agr == Agr::ThirdSg => "does",
            _ => "do",
        };
        self.out[mark] = aux.into();
        self.push(v.base);
        self.complement(v);
    }

    fn imperative(&mut self) {
        let lex: &'static Lexicon = &LEXICON;
        let pool: Vec<&'static Verb> = lex
            .verbs
            .iter()
            .filter(|v| v.frame == Frame::Transitive)
            .collect();
        let v = *pool.choose(&mut self.rng).expect("verbs");
        if self.chance(0.3) {
            self.push("do");
            self.push("not");
        } else {
            self.push("please");
        }
        self.push(v.base);
        self.complement(v);
    }

    fn sentence(mut self) -> Vec<String> {
        let roll: f64 = self.rng.random();
        let end = if roll < 0.67 {
            if self.chance(0.15) {
                let front = self.pick(&[
                    "in the morning",
                    "after lunch",
                    "at first",
                    "later",
                    "in the evening",
                ]);
                for w in front.split(' ') {
                    self.push(w);
                }
                self.push(",");
            }
            self.clause();
            let mut extra = 0;
            while extra < 3 && self.chance(0.4) {
                let conj = self.pick(&["because", "when", "and", ", but", "so", "while", "after"]);
                for w in conj.split(' ') {
                    self.push(w);
                }
                self.clause();
                extra += 1;
            }
            "."
        } else if roll < 0.77 {
            self.copula();
            "."
        } else if roll < 0.82 {
            self.comparative();
            "."
        } else if roll < 0.90 {
            self.existential();
            "."
        } else if roll < 0.97 {
            self.question();
            "?"
        } else {
            self.imperative();
            "."
        };
        self.push(end);
        self.out
    }
}

/// `n` clean sentences. Sentence `i` depends only on `(seed, i)`, so a
/// shorter corpus is a prefix of a longer one.
pub fn clean_corpus(n: usize, seed: u64) -> Vec<Sentence> {
    (0..n).map(|i| clean_sentence(seed, i)).collect()
}

pub fn clean_sentence(seed: u64, i: usize) -> Sentence {
    let g = Gen {
        depth: 0,
        rng: rng_for(seed, &format!("desk\u{1f}{i}")),
        out: Vec::new(),
    };
    let tokens = g.sentence();
    Sentence::with_id(detokenize(&tokens), format!("desk-{i}"))
}

/// Kinds of learner error the channel produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerError {
    ArticleDrop,
    ArticleSwap,
    ArticleInsert,
    PrepositionSwap,
    PrepositionDrop,
    Agreement,
    VerbForm,
    NounNumber,
    Spelling,
    Confusion,
}

const ERROR_WEIGHTS: &[(LearnerError, u32)] = &[
    (LearnerError::ArticleDrop, 3),
    (LearnerError::ArticleSwap, 2),
    (LearnerError::ArticleInsert, 1),
    (LearnerError::PrepositionSwap, 3),
    (LearnerError::PrepositionDrop, 1),
    (LearnerError::Agreement, 3),
    (LearnerError::VerbForm, 2),
    (LearnerError::NounNumber, 2),
    (LearnerError::Spelling, 3),
    (LearnerError::Confusion, 1),
];

fn swap_article(a: &str, rng: &mut ChaCha8Rng) -> &'static str {
    match a {
        "a" => ["an", "the"].choose(rng).expect("nonempty"),
        "an" => ["a", "the"].choose(rng).expect("nonempty"),
        _ => ["a", "an"].choose(rng).expect("nonempty"),
    }
}

fn typo(word: &str, rng: &mut ChaCha8Rng) -> Option<String> {
    let mut c: Vec<char> = word.chars().collect();
    if c.len() < 3 {
        return None;
    }
    let vowels = ['a', 'e', 'i', 'o', 'u'];
    match rng.random_range(0..4) {
        0 => {
            c.remove(rng.random_range(1..c.len()));
        }
        1 => {
            let i = rng.random_range(0..c.len());
            c.insert(i, c[i]);
        }
        2 => {
            let i = rng.random_range(0..c.len() - 1);
            c.swap(i, i + 1);
        }
        _ => {
            let spots: Vec<usize> = (0..c.len()).filter(|&i| vowels.contains(&c[i])).collect();
            let &i = spots.choose(rng)?;
            let others: Vec<char> = vowels.iter().copied().filter(|&v| v != c[i]).collect();
            c[i] = *others.choose(rng)?;
        }
    }
    let out: String = c.into_iter().collect();
    (out != word).then_some(out)
}

/// Tries one error of `kind`; `None` if the sentence has no site for it.
fn apply_error(kind: LearnerError, tokens: &[String], rng: &mut ChaCha8Rng) -> Option<Vec<String>> {
    let lex: &Lexicon = &LEXICON;
    let sites = |pred: &dyn Fn(usize, &str) -> bool| -> Vec<usize> {
        (0..tokens.len()).filter(|&i| pred(i, &tokens[i])).collect()
    };
    let mut out = tokens.to_vec();
    match kind {
        LearnerError::ArticleDrop => {
            let &i = sites(&|_, t| ARTICLES.contains(&t)).choose(rng)?;
            out.remove(i);
        }
        LearnerError::ArticleSwap => {
            let &i = sites(&|_, t| ARTICLES.contains(&t)).choose(rng)?;
            out[i] = swap_article(&tokens[i], rng).to_string();
        }
        LearnerError::ArticleInsert => {
            let &i = sites(&|i, t| {
                let before = if i == 0 { "" } else { tokens[i - 1].as_str() };
                let bare_noun = lex
                    .nouns
                    .iter()
                    .any(|n| n.pl == Some(t) || (n.pl.is_none() && n.sg == t));
                (bare_noun || NAMES.contains(&t))
                    && !ARTICLES.contains(&before)
                    && !POSSESSIVES.contains(&before)
            })
            .choose(rng)?;
            out.insert(i, "the".into());
        }
        LearnerError::PrepositionSwap => {
            let &i = sites(&|_, t| CONFUSABLE_PREPS.contains(&t)).choose(rng)?;
            let others: Vec<&str> = CONFUSABLE_PREPS
                .iter()
                .copied()
                .filter(|p| *p != tokens[i])
                .collect();
            out[i] = others.choose(rng)?.to_string();
        }
        LearnerError::PrepositionDrop => {
            let &i = sites(&|i, t| CONFUSABLE_PREPS.contains(&t) && i > 0).choose(rng)?;
            out.remove(i);
        }
        LearnerError::Agreement => {
            let pairs: &[(&str, &str)] = &[
                ("is", "are"),
                ("are", "is"),
                ("was", "were"),
                ("were", "was"),
                ("has", "have"),
                ("have", "has"),
                ("does", "do"),
                ("do", "does"),
                ("am", "is"),
            ];
            let candidates = sites(&|i, t| {
                pairs.iter().any(|p| p.0 == t)
                    || lex.verb_forms.get(t).is_some_and(|fs| {
                        fs.iter().any(|f| f.1 == VerbForm::S3)
                            || (fs.iter().any(|f| f.1 == VerbForm::Base)
                                && i > 0
                                && ["I", "you", "we", "they"].contains(&tokens[i - 1].as_str()))
                    })
            });
            let &i = candidates.choose(rng)?;
            let t = tokens[i].as_str();
            out[i] = if let Some(p) = pairs.iter().find(|p| p.0 == t) {
                p.1.to_string()
            } else {
                let fs = &lex.verb_forms[t];
                let (v, form) = fs[0];
                let verb = &lex.verbs[v];
                if form == VerbForm::S3 || fs.iter().any(|f| f.1 == VerbForm::S3) {
                    verb.base.to_string()
                } else {
                    verb.s3.to_string()
                }
            };
        }
        LearnerError::VerbForm => {
            let candidates = sites(&|_, t| {
                lex.verb_forms.get(t).is_some_and(|fs| {
                    fs.iter().any(|f| {
                        matches!(
                            f.1,
                            VerbForm::Past | VerbForm::Ing | VerbForm::Pp | VerbForm::Base
                        )
                    })
                })
            });
            let &i = candidates.choose(rng)?;
            let (v, form) = lex.verb_forms[tokens[i].as_str()][0];
            let verb = &lex.verbs[v];
            let options: Vec<&str> = match form {
                VerbForm::Past | VerbForm::Pp => vec![verb.base, verb.ing],
                VerbForm::Ing => vec![verb.base, verb.past],
                VerbForm::Base => vec![verb.ing, verb.past],
                VerbForm::S3 => vec![verb.ing],
            };
            let options: Vec<&str> = options.into_iter().filter(|o| *o != tokens[i]).collect();
            out[i] = options.choose(rng)?.to_string();
        }
        LearnerError::NounNumber => {
            let &i = sites(&|_, t| lex.noun_number.contains_key(t)).choose(rng)?;
            out[i] = lex.noun_number[tokens[i].as_str()].to_string();
        }
        LearnerError::Spelling => {
            let &i =
                sites(&|_, t| lex.open_words.contains(t) && t.chars().count() >= 3).choose(rng)?;
            out[i] = typo(&tokens[i], rng)?;
        }
        LearnerError::Confusion => {
            let pairs: &[(&str, &str)] = &[
                ("their", "there"),
                ("there", "their"),
                ("than", "then"),
                ("then", "than"),
            ];
            let &i = sites(&|_, t| pairs.iter().any(|p| p.0 == t)).choose(rng)?;
            out[i] = pairs
                .iter()
                .find(|p| p.0 == tokens[i])
                .map(|p| p.1.to_string())?;
        }
    }
    (out != tokens).then_some(out)
}

/// Adds one learner error (two with probability 0.3) to `y`. Returns `y`
/// unchanged if no error applies.
pub fn learner_corrupt(y: &Sentence, seed: u64) -> Sentence {
    let mut rng = rng_for(seed, &format!("learner\u{1f}{}", y.text()));
    let n = if rng.random_bool(0.3) { 2 } else { 1 };
    let mut tokens = y.tokens.clone();
    let total: u32 = ERROR_WEIGHTS.iter().map(|w| w.1).sum();
    for _ in 0..n {
        for _attempt in 0..20 {
            let mut r = rng.random_range(0..total);
            let mut kind = ERROR_WEIGHTS[0].0;
            for &(k, w) in ERROR_WEIGHTS {
                if r < w {
                    kind = k;
                    break;
                }
                r -= w;
            }
            if let Some(next) = apply_error(kind, &tokens, &mut rng) {
                tokens = next;
                break;
            }
        }
    }
    let mut s = Sentence::new(detokenize(&tokens));
    s.id = y.id.clone();
    s
}

/// (learner-corrupted, clean) pairs, dropping any sentence the channel
/// left unchanged.
pub fn learner_pairs(clean: &[Sentence], seed: u64) -> Vec<SentencePair> {
    clean
        .iter()
        .map(|y| SentencePair::new(learner_corrupt(y, seed), y.clone(), PairSource::Labeled))
        .filter(|p| !p.is_identity())
        .collect()
}

/// Unlabeled text: each sentence is replaced by a learner-corrupted copy
/// with probability `bad_fraction`.
pub fn unlabeled_mix(clean: &[Sentence], bad_fraction: f64, seed: u64) -> Vec<Sentence> {
    clean
        .iter()
        .map(|y| {
            let mut rng = rng_for(seed, &format!("mix\u{1f}{}", y.text()));
            if rng.random_bool(bad_fraction) {
                learner_corrupt(y, seed)
            } else {
                y.clone()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_prefix_stable() {
        let a = clean_corpus(50, 3);
        assert_eq!(a, clean_corpus(50, 3));
        assert_eq!(a[..20], clean_corpus(20, 3)[..]);
        assert_ne!(a, clean_corpus(50, 4));
        assert!(a.iter().all(|s| s.len() >= 3));
    }

    #[test]
    fn sentences_look_like_english() {
        let c = clean_corpus(2000, 1);
        let distinct: HashSet<String> = c.iter().map(|s| s.text()).collect();
        assert!(distinct.len() > 1900);
        let mean = c.iter().map(Sentence::len).sum::<usize>() as f64 / c.len() as f64;
        assert!((6.0..14.0).contains(&mean), "{mean}");
        for s in &c {
            let t = s.text();
            for w in s.tokens.windows(2) {
                assert!(
                    !(w[0] == "a" && w[1].starts_with(['a', 'e', 'i', 'o', 'u'])),
                    "{t}"
                );
            }
            assert!(t.ends_with('.') || t.ends_with('?'), "{t}");
        }
    }

    #[test]
    fn learner_errors_are_small_and_frequent() {
        let c = clean_corpus(500, 2);
        let pairs = learner_pairs(&c, 9);
        assert!(pairs.len() > 480, "{}", pairs.len());
        for p in &pairs {
            let d = crate::text::token_distance(&p.bad.tokens, &p.good.tokens);
            assert!((1..=2).contains(&d), "{} / {}", p.bad, p.good);
        }
        assert_eq!(learner_pairs(&c, 9), pairs);
    }

    #[test]
    fn typos_change_the_word() {
        let mut rng = rng_for(0, "t");
        for _ in 0..200 {
            let t = typo("teacher", &mut rng).unwrap();
            assert_ne!(t, "teacher");
            assert!(crate::text::char_distance(&t, "teacher") <= 2);
        }
    }
}
