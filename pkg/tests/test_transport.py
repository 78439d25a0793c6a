import socket
import threading

import pytest

from mmpi.errors import (
    BindFailure,
    ConnectFailure,
    HeadClosed,
    ProtocolViolation,
    RegistrationTimeout,
)
from mmpi.transport import (
    ClusterConfig,
    HostEntry,
    Role,
    bind_head,
    head_start,
    parse_address,
    parse_hosts_file,
    worker_join,
)
from mmpi.wire import MessageFrame, MsgType, Payload, encode_frame

from helpers import close_world, make_world


def test_single_process_world():
    world = head_start(ClusterConfig(head_address="127.0.0.1:0",
                                     expected_workers=0))
    assert world.my_rank == 0
    assert world.world_size == 1
    assert world.role == Role.HEAD_PARTICIPANT
    close_world([world])


def test_four_rank_registration():
    worlds = make_world(4)
    try:
        assert sorted(w.my_rank for w in worlds) == [0, 1, 2, 3]
        assert {w.world_size for w in worlds} == {4}
        assert worlds[0].role == Role.HEAD_PARTICIPANT
        assert all(w.role == Role.WORKER for w in worlds[1:])
        # head holds one connection per worker; workers hold one to the head
        assert sorted(worlds[0].connections) == [1, 2, 3]
        assert all(list(w.connections) == [0] for w in worlds[1:])
    finally:
        close_world(worlds)


def test_registration_timeout_when_worker_missing():
    listener = bind_head(ClusterConfig(head_address="127.0.0.1:0",
                                       expected_workers=2))
    port = listener.getsockname()[1]
    config = ClusterConfig(head_address=f"127.0.0.1:{port}",
                           expected_workers=2, connect_timeout=1.0)
    errors = {}

    def head():
        try:
            head_start(config, listener=listener)
        except Exception as exc:
            errors["head"] = exc

    def lone_worker():
        try:
            worker_join(config)
        except Exception as exc:
            errors["worker"] = exc

    threads = [threading.Thread(target=head), threading.Thread(target=lone_worker)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=10)
    assert isinstance(errors["head"], RegistrationTimeout)
    assert isinstance(errors["worker"], HeadClosed)


def test_first_frame_must_be_hello():
    listener = bind_head(ClusterConfig(head_address="127.0.0.1:0",
                                       expected_workers=1))
    port = listener.getsockname()[1]
    config = ClusterConfig(head_address=f"127.0.0.1:{port}",
                           expected_workers=1, connect_timeout=5.0)

    def rogue():
        with socket.create_connection(("127.0.0.1", port), timeout=5) as sock:
            sock.sendall(encode_frame(MessageFrame(
                MsgType.SEND, source=0, dest=0, tag=0, payload=Payload.empty())))

    t = threading.Thread(target=rogue)
    t.start()
    with pytest.raises(ProtocolViolation):
        head_start(config, listener=listener)
    t.join()


def test_worker_adopts_welcome_payload():
    # a scripted fake head assigns rank 5 in a world of 8
    server = socket.socket()
    server.bind(("127.0.0.1", 0))
    server.listen()
    port = server.getsockname()[1]

    def fake_head():
        conn, _ = server.accept()
        conn.recv(64)  # HELLO
        conn.sendall(encode_frame(MessageFrame(
            MsgType.WELCOME, dest=5, payload=Payload.u64([5, 8]))))
        conn.sendall(encode_frame(MessageFrame(MsgType.START, dest=5)))

    t = threading.Thread(target=fake_head)
    t.start()
    world = worker_join(ClusterConfig(head_address=f"127.0.0.1:{port}",
                                      connect_timeout=5.0))
    t.join()
    assert world.my_rank == 5
    assert world.world_size == 8
    world._close_sockets()
    server.close()


def test_head_closing_before_welcome():
    server = socket.socket()
    server.bind(("127.0.0.1", 0))
    server.listen()
    port = server.getsockname()[1]

    def slam():
        conn, _ = server.accept()
        conn.close()

    t = threading.Thread(target=slam)
    t.start()
    with pytest.raises(HeadClosed):
        worker_join(ClusterConfig(head_address=f"127.0.0.1:{port}",
                                  connect_timeout=5.0))
    t.join()
    server.close()


def test_connect_failure():
    with pytest.raises(ConnectFailure):
        worker_join(ClusterConfig(head_address="127.0.0.1:1",
                                  connect_timeout=0.3))


def test_bind_failure():
    first = bind_head(ClusterConfig(head_address="127.0.0.1:0"))
    port = first.getsockname()[1]
    with pytest.raises(BindFailure):
        bind_head(ClusterConfig(head_address=f"127.0.0.1:{port}"))
    first.close()


def test_parse_address():
    assert parse_address("10.0.0.1:4000") == ("10.0.0.1", 4000)
    assert parse_address("myhost") == ("myhost", 29500)


def test_config_validation():
    with pytest.raises(ValueError):
        ClusterConfig(expected_workers=-1)
    with pytest.raises(ValueError):
        ClusterConfig(connect_timeout=0)


def test_parse_hosts_file(tmp_path):
    hosts = tmp_path / "hosts"
    hosts.write_text(
        "# comment line\n"
        "#exec: ssh -p 2222 {host} {cmd}\n"
        "node1 slots=4\n"
        "node2:4100 slots=2  # trailing comment\n"
        "node3\n"
        "\n"
    )
    parsed = parse_hosts_file(hosts)
    assert parsed.entries == (
        HostEntry("node1", None, 4),
        HostEntry("node2", 4100, 2),
        HostEntry("node3", None, 1),
    )
    assert parsed.total_slots == 7
    assert parsed.exec_template == "ssh -p 2222 {host} {cmd}"


def test_parse_hosts_file_rejects_unknown_option(tmp_path):
    hosts = tmp_path / "hosts"
    hosts.write_text("node1 cpus=4\n")
    with pytest.raises(ValueError):
        parse_hosts_file(hosts)
