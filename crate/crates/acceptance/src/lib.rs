//! Holds the `acceptance` test target; the checks themselves live in
//! `polywythoff::selftest` so the command-line `selftest` runs the same rows.
