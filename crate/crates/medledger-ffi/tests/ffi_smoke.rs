//! Drive the C ABI exactly as a foreign caller would: raw pointers,
//! NUL-terminated strings, explicit buffer frees.

use std::ffi::{CStr, CString};

use medledger_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(med_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn full_session_over_the_c_abi() {
    let dir = tempfile::tempdir().unwrap();
    let dir_c = c(dir.path().to_str().unwrap());

    unsafe {
        let node = med_node_bootstrap(dir_c.as_ptr());
        assert!(!node.is_null(), "bootstrap failed: {}", last_error());
        assert_eq!(med_ledger_height(node), 0);

        // identities
        assert_eq!(
            med_register_identity(node, c("d001").as_ptr(), c("doctor").as_ptr(), c("cardio").as_ptr()),
            MedStatus::Ok
        );
        assert_eq!(
            med_register_identity(node, c("d001").as_ptr(), c("doctor").as_ptr(), c("cardio").as_ptr()),
            MedStatus::Exists,
            "duplicate registration must report Exists"
        );

        // a doctor cannot mutate policies
        assert_eq!(
            med_policy_add(
                node,
                c("d001").as_ptr(),
                c("d001").as_ptr(),
                c("doctor").as_ptr(),
                c("cardio").as_ptr(),
                c("r1").as_ptr(),
                1,
                0,
                u64::MAX,
            ),
            MedStatus::AuthFailed
        );

        // the bootstrap admin can
        assert_eq!(
            med_policy_add(
                node,
                c("admin").as_ptr(),
                c("d001").as_ptr(),
                c("doctor").as_ptr(),
                c("cardio").as_ptr(),
                c("r1").as_ptr(),
                1,
                0,
                u64::MAX,
            ),
            MedStatus::Ok,
            "{}",
            last_error()
        );

        // record content round-trips through the store and chain
        let content = b"c-abi record payload";
        assert_eq!(
            med_record_add(node, c("d001").as_ptr(), c("r1").as_ptr(), content.as_ptr(), content.len()),
            MedStatus::Ok,
            "{}",
            last_error()
        );
        let mut buf = MedBuffer { data: std::ptr::null_mut(), len: 0 };
        assert_eq!(
            med_record_query(node, c("r1").as_ptr(), &mut buf),
            MedStatus::Ok
        );
        assert_eq!(std::slice::from_raw_parts(buf.data, buf.len), content);
        med_buffer_free(buf);

        // granted access returns the bytes too
        let mut granted = MedBuffer { data: std::ptr::null_mut(), len: 0 };
        assert_eq!(
            med_access_check(
                node,
                c("d001").as_ptr(),
                c("doctor").as_ptr(),
                c("cardio").as_ptr(),
                c("r1").as_ptr(),
                &mut granted,
            ),
            MedStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(std::slice::from_raw_parts(granted.data, granted.len), content);
        med_buffer_free(granted);

        // a registered patient with no matching policy
        assert_eq!(
            med_register_identity(node, c("p009").as_ptr(), c("patient").as_ptr(), c("derm").as_ptr()),
            MedStatus::Ok
        );
        assert_eq!(
            med_access_check(
                node,
                c("p009").as_ptr(),
                c("patient").as_ptr(),
                c("derm").as_ptr(),
                c("r1").as_ptr(),
                std::ptr::null_mut(),
            ),
            MedStatus::NoPolicy
        );
        // an unregistered caller cannot even sign a request
        assert_eq!(
            med_access_check(
                node,
                c("ghost").as_ptr(),
                c("patient").as_ptr(),
                c("derm").as_ptr(),
                c("r1").as_ptr(),
                std::ptr::null_mut(),
            ),
            MedStatus::AuthFailed
        );

        // policy text query
        let mut text = MedBuffer { data: std::ptr::null_mut(), len: 0 };
        assert_eq!(
            med_policy_query(
                node,
                c("d001").as_ptr(),
                c("doctor").as_ptr(),
                c("cardio").as_ptr(),
                c("r1").as_ptr(),
                &mut text,
            ),
            MedStatus::Ok
        );
        let policy_text = String::from_utf8_lossy(std::slice::from_raw_parts(text.data, text.len)).into_owned();
        assert!(policy_text.starts_with("userId=d001\n"), "{policy_text}");
        med_buffer_free(text);

        assert_eq!(med_ledger_verify(node), 1);
        med_node_close(node);

        // reopen from disk
        let node = med_node_open(dir_c.as_ptr());
        assert!(!node.is_null(), "{}", last_error());
        let mut buf = MedBuffer { data: std::ptr::null_mut(), len: 0 };
        assert_eq!(med_record_query(node, c("r1").as_ptr(), &mut buf), MedStatus::Ok);
        assert_eq!(std::slice::from_raw_parts(buf.data, buf.len), content);
        med_buffer_free(buf);
        med_node_close(node);
    }
}

#[test]
fn null_and_error_paths() {
    unsafe {
        assert!(med_node_open(std::ptr::null()).is_null());
        assert_eq!(med_ledger_verify(std::ptr::null_mut()), -1);
        assert_eq!(med_ledger_height(std::ptr::null_mut()), -1);
        assert_eq!(
            med_record_delete(std::ptr::null_mut(), std::ptr::null(), std::ptr::null()),
            MedStatus::NullArgument
        );
        // opening a directory that was never initialized fails cleanly
        let dir = tempfile::tempdir().unwrap();
        let dir_c = c(dir.path().to_str().unwrap());
        assert!(med_node_open(dir_c.as_ptr()).is_null());
        assert!(!last_error().is_empty());
        // freeing an empty buffer is a no-op
        med_buffer_free(MedBuffer { data: std::ptr::null_mut(), len: 0 });
    }
}

#[test]
fn unknown_record_reports_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let dir_c = c(dir.path().to_str().unwrap());
    unsafe {
        let node = med_node_bootstrap(dir_c.as_ptr());
        assert!(!node.is_null());
        let mut buf = MedBuffer { data: std::ptr::null_mut(), len: 0 };
        assert_eq!(
            med_record_query(node, c("missing").as_ptr(), &mut buf),
            MedStatus::NotFound
        );
        assert!(buf.data.is_null());
        med_node_close(node);
    }
}
