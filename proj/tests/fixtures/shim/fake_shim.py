#!/usr/bin/env python3
"""Stand-in for the program runner used by executor tests.

Usage: fake_shim.py <program-file> --allow mod,...
The first line of the program selects the behaviour: "# mode: <name> [arg]".
"""
import json
import sys
import time


def main():
    path = sys.argv[1]
    allow = sys.argv[3] if len(sys.argv) > 3 and sys.argv[2] == "--allow" else ""
    with open(path, encoding="utf-8") as f:
        first = f.readline().strip()
    parts = first.removeprefix("# mode:").split()
    mode, arg = parts[0], (parts[1] if len(parts) > 1 else "")

    if mode == "ok":
        print("chatter from the program")
        print(json.dumps({"status": "ok", "answer": arg, "error": None, "stdout": "chatter"}))
    elif mode == "allow":
        print(json.dumps({"status": "ok", "answer": str(len(allow.split(","))), "error": None, "stdout": ""}))
    elif mode == "sleep":
        time.sleep(float(arg))
        print(json.dumps({"status": "ok", "answer": "1", "error": None, "stdout": ""}))
    elif mode in ("syntax_error", "runtime_error", "blocked_import"):
        print(json.dumps({"status": mode, "answer": None, "error": arg or mode, "stdout": ""}))
    elif mode == "ok_no_answer":
        print(json.dumps({"status": "ok", "answer": None, "error": None, "stdout": ""}))
    elif mode == "garbage":
        print("this is not json")
    elif mode == "crash":
        sys.stderr.write("Segmentation fault (simulated)\n")
        sys.exit(139)
    else:
        print(json.dumps({"status": "weird", "answer": None, "error": None, "stdout": ""}))


if __name__ == "__main__":
    main()
