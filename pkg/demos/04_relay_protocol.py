"""Executable model of the relay protocol with sealed envelopes.

Runs the keyed, server-relayed exchange on a small graph, prints a slice of
the transcript, and shows what the server and a curious client can and
cannot derive from it.
"""

from walkshuffle import (
    adversary_view,
    complete_graph,
    run_protocol,
    validate_transcript,
)

g = complete_graph(4)
transcript = run_protocol(g, rounds=3, reporting="single", seed=42)

print("=== transcript slice ===")
for event in transcript.events[:8]:
    print(" ", event.as_record())
print("  ...")
for event in transcript.events[-4:]:
    print(" ", event.as_record())

print(f"\nphases: {' -> '.join(transcript.phases)}")
print(f"invariant violations: {validate_transcript(transcript) or 'none'}")
print(f"reports held after final round: {transcript.held_counts.tolist()}")
print(f"submissions (single protocol sends exactly n): {len(transcript.submissions)}")

print("\n=== the server's view ===")
server = adversary_view(transcript, "server")
print(f"links (report uid -> final sender): {server.links}")
print(f"envelope contents expose no earlier sender: {server.contents_sender_free}")

print("\n=== a curious client's view ===")
client = adversary_view(transcript, "client:2")
print(f"hop envelopes relayed through client:2: {len(client.visible)}")
print(f"attempts to peek inside were denied: {len(client.violations)}")
for _, msg in client.violations[:2]:
    print("  ", msg)
