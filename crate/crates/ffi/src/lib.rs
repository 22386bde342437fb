//! C ABI for the classifier: opaque handles, integer status codes, and
//! JSON strings across the boundary. The generated header lives in
//! include/fontaine.h.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fontaine::fieldcore::Field;
use fontaine::ingest::{load_pack_str, parse_odlyzko_csv, RecordJson};
use fontaine::pipeline::{classify, Caps, OdlyzkoTable};
use fontaine::schemecalc::{sort_filtration, CtxDichotomy, FiltrationWord, RewriteContext};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum FontaineStatus {
    Ok = 0,
    ParseError = 1,
    ValidationError = 2,
    ComputeError = 3,
    NullArgument = 4,
}

/// Opaque validated field handle.
pub struct FontaineField {
    field: Field,
}

/// Opaque root-discriminant table handle.
pub struct FontaineTable {
    table: OdlyzkoTable,
}

thread_local! {
    static LAST_ERROR: std::cell::RefCell<CString> =
        std::cell::RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', "?")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Last error message for this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn fontaine_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version string (static storage).
#[no_mangle]
pub extern "C" fn fontaine_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn cstr<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `fontaine_*` function
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fontaine_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and validate a base-field record from JSON.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fontaine_field_parse(
    json: *const c_char,
    out: *mut *mut FontaineField,
) -> FontaineStatus {
    let Some(json) = cstr(json) else {
        set_error("null or non-utf8 json");
        return FontaineStatus::NullArgument;
    };
    if out.is_null() {
        set_error("null out pointer");
        return FontaineStatus::NullArgument;
    }
    let dto: RecordJson = match serde_json::from_str(json) {
        Ok(d) => d,
        Err(e) => {
            set_error(&format!("parse: {e}"));
            return FontaineStatus::ParseError;
        }
    };
    let rec = match dto.to_record() {
        Ok(r) => r,
        Err(e) => {
            set_error(&format!("parse: {e}"));
            return FontaineStatus::ParseError;
        }
    };
    match Field::new_base(rec) {
        Ok(field) => {
            *out = Box::into_raw(Box::new(FontaineField { field }));
            FontaineStatus::Ok
        }
        Err(e) => {
            set_error(&format!("validation: {e}"));
            FontaineStatus::ValidationError
        }
    }
}

/// # Safety
/// `f` must come from `fontaine_field_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fontaine_field_free(f: *mut FontaineField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Load a root-discriminant table from CSV, or pass NULL for the
/// compiled-in conservative table.
///
/// # Safety
/// `csv` must be NULL or a valid NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fontaine_table_load(
    csv: *const c_char,
    out: *mut *mut FontaineTable,
) -> FontaineStatus {
    if out.is_null() {
        set_error("null out pointer");
        return FontaineStatus::NullArgument;
    }
    let table = if csv.is_null() {
        OdlyzkoTable::default_grh()
    } else {
        let Some(csv) = cstr(csv) else {
            set_error("non-utf8 csv");
            return FontaineStatus::ParseError;
        };
        match parse_odlyzko_csv(csv) {
            Ok(t) => t,
            Err(e) => {
                set_error(&format!("table: {e}"));
                return FontaineStatus::ParseError;
            }
        }
    };
    *out = Box::into_raw(Box::new(FontaineTable { table }));
    FontaineStatus::Ok
}

/// # Safety
/// `t` must come from `fontaine_table_load` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fontaine_table_free(t: *mut FontaineTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Classify a validated field. `pack_json` may be NULL. The verdict is
/// returned as a JSON document (see the verdict schema in the README);
/// free it with `fontaine_string_free`.
///
/// # Safety
/// Handles must be live; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fontaine_classify(
    field: *const FontaineField,
    pack_json: *const c_char,
    table: *const FontaineTable,
    tower_cap: u32,
    out_json: *mut *mut c_char,
) -> FontaineStatus {
    if field.is_null() || table.is_null() || out_json.is_null() {
        set_error("null argument");
        return FontaineStatus::NullArgument;
    }
    let field = &(*field).field;
    let table = &(*table).table;
    if tower_cap < 4 {
        set_error("tower cap must be at least 4");
        return FontaineStatus::ValidationError;
    }
    let pack = match cstr(pack_json) {
        None => None,
        Some(json) => match load_pack_str(json, &field.record) {
            Ok(p) => Some(p),
            Err(e) => {
                set_error(&format!("pack: {e}"));
                return FontaineStatus::ParseError;
            }
        },
    };
    let verdict = classify(field, pack.as_ref(), table, &Caps { tower_cap: tower_cap as usize });
    match serde_json::to_string(&verdict) {
        Ok(s) => {
            *out_json = give_string(s);
            FontaineStatus::Ok
        }
        Err(e) => {
            set_error(&format!("serialize: {e}"));
            FontaineStatus::ComputeError
        }
    }
}

/// Sort a filtration word (comma-separated tokens, e.g. "Z2,mu2") into
/// canonical block order. `dichotomy` is 1 or 2; qe flags apply to the
/// three-prime case. The sorted word is returned as a string.
///
/// # Safety
/// `word` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fontaine_sort_word(
    word: *const c_char,
    nprimes: u32,
    dichotomy: u32,
    qe1: bool,
    qe2: bool,
    out: *mut *mut c_char,
) -> FontaineStatus {
    let Some(word) = cstr(word) else {
        set_error("null or non-utf8 word");
        return FontaineStatus::NullArgument;
    };
    if out.is_null() {
        set_error("null out pointer");
        return FontaineStatus::NullArgument;
    }
    if !(1..=3).contains(&nprimes) || !(1..=2).contains(&dichotomy) {
        set_error("nprimes must be 1..=3 and dichotomy 1 or 2");
        return FontaineStatus::ValidationError;
    }
    let d = if dichotomy == 1 { CtxDichotomy::D1 } else { CtxDichotomy::D2 };
    let ctx = RewriteContext::new(nprimes as usize, d, qe1, qe2);
    let parsed = match FiltrationWord::parse(word, ctx) {
        Ok(w) => w,
        Err(e) => {
            set_error(&format!("word: {e}"));
            return FontaineStatus::ParseError;
        }
    };
    match sort_filtration(&parsed) {
        Ok((sorted, _trace)) => {
            *out = give_string(sorted.render());
            FontaineStatus::Ok
        }
        Err(e) => {
            set_error(&format!("sort: {e}"));
            FontaineStatus::ComputeError
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn classify_q_through_the_c_abi() {
        let rec = serde_json::json!({
            "schema": "fontaine.fieldrecord.v1",
            "label": "1.1.1.1",
            "degree": 1,
            "poly": ["0", "1"],
            "integral_basis": [["1"]],
            "disc": "1",
            "signature": [1, 0],
            "h": "1",
            "h_plus": "1",
            "units": {"torsion": ["-1"], "fundamental": []},
            "two_factorization": [
                {"two_generators": [["2"], ["2"]], "e": 1, "f": 1, "generator": ["2"]}
            ],
        })
        .to_string();
        unsafe {
            let mut field: *mut FontaineField = ptr::null_mut();
            assert!(fontaine_field_parse(c(&rec).as_ptr(), &mut field) == FontaineStatus::Ok);
            let mut table: *mut FontaineTable = ptr::null_mut();
            assert!(fontaine_table_load(ptr::null(), &mut table) == FontaineStatus::Ok);
            let mut out: *mut c_char = ptr::null_mut();
            let st = fontaine_classify(field, ptr::null(), table, 20, &mut out);
            assert!(st == FontaineStatus::Ok);
            let verdict = CStr::from_ptr(out).to_str().unwrap().to_string();
            assert!(verdict.contains("one_prime"));
            fontaine_string_free(out);
            fontaine_field_free(field);
            fontaine_table_free(table);
        }
    }

    #[test]
    fn sort_word_through_the_c_abi() {
        unsafe {
            let mut out: *mut c_char = ptr::null_mut();
            let st = fontaine_sort_word(c("Z2,mu2").as_ptr(), 1, 1, true, true, &mut out);
            assert!(st == FontaineStatus::Ok);
            assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "mu2,Z2");
            fontaine_string_free(out);
        }
    }

    #[test]
    fn errors_set_messages() {
        unsafe {
            let mut field: *mut FontaineField = ptr::null_mut();
            let st = fontaine_field_parse(c("{not json").as_ptr(), &mut field);
            assert!(st == FontaineStatus::ParseError);
            let msg = CStr::from_ptr(fontaine_last_error()).to_str().unwrap();
            assert!(msg.contains("parse"));
        }
    }
}
