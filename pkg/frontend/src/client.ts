/** Thin client: wires a line-based duplex transport to the view model.
 *
 * The transport is injected so the same client runs over a raw TCP socket
 * (node harness) or any WebSocket bridge. All state flows one way:
 * server message -> view model; the client adds no coordinates of its own.
 */

import { LineDecoder, encodeMessage, type ServerMessage } from "./protocol.js";
import { ViewModel } from "./viewModel.js";

export interface LineTransport {
  send(line: string): void;
  onData(handler: (chunk: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export interface ClientOptions {
  /** Called for every server message after it is applied (message log). */
  onMessage?: (msg: ServerMessage) => void;
  /** Reconnect delay in ms; 0 disables auto-reconnect. */
  reconnectMs?: number;
  connect?: () => Promise<LineTransport>;
}

export class ThinClient {
  readonly view = new ViewModel();
  readonly messageLog: ServerMessage[] = [];
  private transport: LineTransport | null = null;
  private decoder = new LineDecoder();
  private closedByUser = false;

  constructor(private options: ClientOptions = {}) {}

  attach(transport: LineTransport): void {
    this.transport = transport;
    this.decoder = new LineDecoder();
    transport.onData((chunk) => {
      for (const msg of this.decoder.push(chunk)) {
        this.view.apply(msg);
        this.messageLog.push(msg);
        this.options.onMessage?.(msg);
      }
    });
    transport.onClose(() => {
      this.view.disconnected();
      if (!this.closedByUser && this.options.reconnectMs && this.options.connect) {
        setTimeout(() => {
          void this.options
            .connect!()
            .then((t) => this.attach(t))
            .catch(() => this.view.disconnected());
        }, this.options.reconnectMs);
      }
    });
  }

  sendFrame(t: number, hand: number[][], source = "ui"): void {
    this.send({ type: "frame", t, hand, source });
  }

  sendCommand(name: string, extra: Record<string, unknown> = {}): void {
    this.send({ type: "command", name, ...extra });
  }

  private send(msg: object): void {
    if (this.transport === null) throw new Error("client not attached");
    this.transport.send(encodeMessage(msg));
  }

  close(): void {
    this.closedByUser = true;
    this.transport?.close();
  }
}
