import { ApiClient } from './api.js';
import { Dashboard } from './controller.js';
import { mountChat } from './chat.js';
import { mountBoard } from './board.js';

const api = new ApiClient('');
const dashboard = new Dashboard(api);

mountChat(document.getElementById('chat')!, dashboard);
mountBoard(document.getElementById('board')!, dashboard);

void dashboard.refreshBoard();
dashboard.startPolling();
