use super::{GameSpec, Mode};

pub(super) const OPENING_INTRO: &str = "You are hungry! Let's cook a delicious meal.";
pub(super) const OPENING_DIRECTIVE: &str = "Check the cookbook in the kitchen for the recipe.";
pub(super) const OPENING_OUTRO: &str = "Once done, enjoy your meal!";
pub(super) const KNIFE_HINT: &str = "Cutting something requires a knife.";

pub(super) fn article(name: &str) -> &'static str {
    match name.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

pub(super) fn with_article(name: &str) -> String {
    format!("{} {}", article(name), name)
}

pub(super) fn join_list(parts: &[String]) -> String {
    match parts {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

pub(super) fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

pub(super) fn opening(mode: Mode) -> String {
    match mode {
        Mode::Stripped => format!("{OPENING_INTRO} {OPENING_OUTRO}"),
        _ => format!("{OPENING_INTRO} {OPENING_DIRECTIVE} {OPENING_OUTRO}"),
    }
}

const COOKBOOK_HEADER: &str = "You open the copy of \"Cooking: A Modern Approach (3rd Ed.)\" and start reading:";

pub(super) fn cookbook(spec: &GameSpec, mode: Mode) -> String {
    if mode == Mode::Stripped {
        return COOKBOOK_HEADER.to_string();
    }
    let mut out = String::from(COOKBOOK_HEADER);
    out.push_str("\n\nRecipe #1\n---------\nGather all following ingredients and follow the directions to prepare this tasty meal.\n\nIngredients:\n");
    for r in &spec.recipe {
        out.push_str(&r.ingredient);
        out.push('\n');
    }
    out.push_str("\nDirections:\n");
    for r in &spec.recipe {
        if let Some(c) = r.cut {
            out.push_str(&format!("{} the {}\n", c.verb(), r.ingredient));
        }
        if let Some(c) = r.cook {
            out.push_str(&format!("{} the {}\n", c.verb(), r.ingredient));
        }
    }
    out.push_str("prepare meal\n");
    out
}
